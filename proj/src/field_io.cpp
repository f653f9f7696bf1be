#include "oamc/field_io.hpp"

#include "oamc/errors.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace oamc {
namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
void put(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T get(std::istream& in) {
  std::array<char, sizeof(T)> bytes;
  if (!in.read(bytes.data(), bytes.size())) throw FormatError("OAMF: truncated stream");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

void put_header(std::ostream& out, std::uint16_t version, const GridSpec& grid, double wavelength,
                double z) {
  out.write("OAMF", 4);
  put<std::uint16_t>(out, version);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(grid.n));
  put<double>(out, grid.window);
  put<double>(out, wavelength);
  put<double>(out, z);
}

}  // namespace

void write_oamf(std::ostream& out, const SampledField& field) {
  put_header(out, kOamfVersion, field.grid, field.wavelength, field.z);
  for (const auto& a : field.amplitude) {
    put<double>(out, a.real());
    put<double>(out, a.imag());
  }
  if (!out) throw FormatError("OAMF: write failed");
}

void write_oamf_real(std::ostream& out, const GridSpec& grid, double wavelength, double z,
                     std::span<const double> values) {
  if (values.size() != grid.samples()) throw FormatError("OAMF: payload size mismatch");
  put_header(out, kOamfVersion | kOamfRealPayload, grid, wavelength, z);
  for (double v : values) put<double>(out, v);
  if (!out) throw FormatError("OAMF: write failed");
}

OamfRecord read_oamf(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "OAMF", 4) != 0)
    throw FormatError("OAMF: bad magic");
  const auto version = get<std::uint16_t>(in);
  if ((version & ~kOamfRealPayload) != kOamfVersion)
    throw FormatError("OAMF: unsupported version " + std::to_string(version));
  OamfRecord rec;
  rec.real_payload = (version & kOamfRealPayload) != 0;
  rec.grid.n = static_cast<int>(get<std::uint32_t>(in));
  rec.grid.window = get<double>(in);
  rec.wavelength = get<double>(in);
  rec.z = get<double>(in);
  rec.samples.resize(rec.grid.samples());
  for (auto& s : rec.samples) {
    const double re = get<double>(in);
    const double im = rec.real_payload ? 0.0 : get<double>(in);
    s = {re, im};
  }
  return rec;
}

void save_oamf(const std::string& path, const SampledField& field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path);
  write_oamf(out, field);
}

OamfRecord load_oamf(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  return read_oamf(in);
}

SampledField to_field(const OamfRecord& record) {
  SampledField f(record.grid, record.wavelength, record.z);
  f.amplitude = record.samples;
  return f;
}

}  // namespace oamc
