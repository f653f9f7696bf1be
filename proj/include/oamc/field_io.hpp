#pragma once

#include "oamc/field_optics.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace oamc {

// "OAMF" binary dump: magic, u16 version, u32 n, f64 window, f64 wavelength,
// f64 z, then n*n samples row-major, little-endian. Complex payloads are
// interleaved (re, im) f64 pairs; bit 15 of the version marks a real f64
// payload (phase screens).
inline constexpr std::uint16_t kOamfVersion = 1;
inline constexpr std::uint16_t kOamfRealPayload = 0x8000;

struct OamfRecord {
  GridSpec grid;
  double wavelength = 0.0;
  double z = 0.0;
  bool real_payload = false;
  std::vector<cdouble> samples;  // imaginary parts zero for real payloads
};

void write_oamf(std::ostream& out, const SampledField& field);
void write_oamf_real(std::ostream& out, const GridSpec& grid, double wavelength, double z,
                     std::span<const double> values);
OamfRecord read_oamf(std::istream& in);

void save_oamf(const std::string& path, const SampledField& field);
OamfRecord load_oamf(const std::string& path);

SampledField to_field(const OamfRecord& record);

}  // namespace oamc
