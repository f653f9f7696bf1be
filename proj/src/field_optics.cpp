#include "oamc/field_optics.hpp"

#include "oamc/errors.hpp"
#include "oamc/fft.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace oamc {

void GridSpec::validate() const {
  if (n < 64 || !std::has_single_bit(static_cast<unsigned>(n)))
    throw std::invalid_argument("grid size must be a power of two >= 64, got " + std::to_string(n));
  if (!(window > 0.0) || !std::isfinite(window))
    throw std::invalid_argument("grid window must be positive");
}

SampledField::SampledField(GridSpec g, double lambda, double z_plane)
    : grid(g), wavelength(lambda), z(z_plane), amplitude(g.samples(), cdouble{}) {
  if (!(lambda > 0.0)) throw std::invalid_argument("wavelength must be positive");
}

double SampledField::power() const {
  double sum = 0.0;
  for (const auto& a : amplitude) sum += std::norm(a);
  return sum * grid.spacing() * grid.spacing();
}

ModeBasis ModeBasis::grid(double waist, std::span<const int> p_values, int ell_min, int ell_max) {
  ModeBasis basis;
  basis.waist = waist;
  for (int p : p_values)
    for (int ell = ell_min; ell <= ell_max; ++ell) basis.indices.push_back({ell, p});
  basis.validate();
  return basis;
}

int ModeBasis::find(LGIndex idx) const noexcept {
  auto it = std::find(indices.begin(), indices.end(), idx);
  return it == indices.end() ? -1 : static_cast<int>(it - indices.begin());
}

void ModeBasis::validate() const {
  if (!(waist > 0.0)) throw std::invalid_argument("basis waist must be positive");
  std::set<std::pair<int, int>> seen;
  for (const auto& idx : indices) {
    if (idx.p < 0) throw std::invalid_argument("radial index must be non-negative");
    if (!seen.insert({idx.ell, idx.p}).second)
      throw std::invalid_argument("duplicate mode in basis");
  }
}

double rayleigh_range(double waist, double wavelength) {
  return kPi * waist * waist / wavelength;
}

BeamParameters BeamParameters::at(double waist, double wavelength, double z) {
  const double zr = oamc::rayleigh_range(waist, wavelength);
  const double k = 2.0 * kPi / wavelength;
  BeamParameters b{};
  b.rayleigh_range = zr;
  b.radius = waist * std::sqrt(1.0 + (z / zr) * (z / zr));
  b.gouy = std::atan2(z, zr);
  // k / (2R) with R = z (1 + zr^2 / z^2)
  b.curvature_k = k * z / (2.0 * (z * z + zr * zr));
  return b;
}

namespace {

void check_resolved(LGIndex idx, double waist, double wavelength, const GridSpec& grid,
                    double z) {
  grid.validate();
  if (waist / grid.spacing() < 8.0)
    throw UnresolvedMode("waist spans fewer than 8 samples");
  if (!(waist < grid.window / 4.0))
    throw UnresolvedMode("waist must be below window/4");
  const auto beam = BeamParameters::at(waist, wavelength, z);
  const double rms = beam.radius * std::sqrt((2.0 * idx.p + std::abs(idx.ell) + 1.0) / 2.0);
  if (rms > 0.45 * grid.window)
    throw UnresolvedMode("mode (" + std::to_string(idx.ell) + "," + std::to_string(idx.p) +
                         ") extends beyond the window");
}

double lg_norm_constant(int p, int abs_ell) {
  return std::exp(0.5 * (std::log(2.0 / kPi) + std::lgamma(p + 1.0) -
                         std::lgamma(p + abs_ell + 1.0)));
}

// Evaluates every mode of `modes` on the grid in one sweep and hands
// (pixel, mode, value) to `sink`. Values omit the constant Gouy factor,
// which `gouy_factor` returns per mode.
class ModeEvaluator {
 public:
  ModeEvaluator(std::span<const LGIndex> modes, double waist, double wavelength,
                const GridSpec& grid, double z)
      : modes_(modes.begin(), modes.end()),
        grid_(grid),
        beam_(BeamParameters::at(waist, wavelength, z)) {
    for (const auto& m : modes_) {
      check_resolved(m, waist, wavelength, grid, z);
      max_abs_ell_ = std::max(max_abs_ell_, std::abs(m.ell));
      max_p_ = std::max(max_p_, m.p);
      constants_.push_back(lg_norm_constant(m.p, std::abs(m.ell)) / beam_.radius);
    }
  }

  cdouble gouy_factor(std::size_t k) const {
    const auto& m = modes_[k];
    return std::polar(1.0, -(2.0 * m.p + std::abs(m.ell) + 1.0) * beam_.gouy);
  }

  template <typename Sink>
  void sweep(Sink&& sink) const {
    const int n = grid_.n;
    const double w2 = beam_.radius * beam_.radius;
    std::vector<double> upow(max_abs_ell_ + 1);
    std::vector<cdouble> epow(max_abs_ell_ + 1);
    // laguerre[a][p] for a = 0..max|ell|, p = 0..max p
    std::vector<double> laguerre(static_cast<std::size_t>(max_abs_ell_ + 1) * (max_p_ + 1));
    for (int j = 0; j < n; ++j) {
      const double y = grid_.coordinate(j);
      for (int i = 0; i < n; ++i) {
        const double x = grid_.coordinate(i);
        const double r2 = x * x + y * y;
        const double t = 2.0 * r2 / w2;
        const double r = std::sqrt(r2);
        const cdouble envelope = std::polar(std::exp(-r2 / w2), beam_.curvature_k * r2);
        const cdouble ephi = r > 0.0 ? cdouble(x / r, y / r) : cdouble(1.0, 0.0);
        const double u = std::sqrt(t);
        upow[0] = 1.0;
        epow[0] = 1.0;
        for (int a = 1; a <= max_abs_ell_; ++a) {
          upow[a] = upow[a - 1] * u;
          epow[a] = epow[a - 1] * ephi;
        }
        for (int a = 0; a <= max_abs_ell_; ++a) {
          double* L = &laguerre[static_cast<std::size_t>(a) * (max_p_ + 1)];
          L[0] = 1.0;
          if (max_p_ >= 1) L[1] = 1.0 + a - t;
          for (int p = 1; p < max_p_; ++p)
            L[p + 1] = ((2.0 * p + 1.0 + a - t) * L[p] - (p + a) * L[p - 1]) / (p + 1.0);
        }
        const std::size_t pixel = static_cast<std::size_t>(j) * n + i;
        for (std::size_t k = 0; k < modes_.size(); ++k) {
          const int a = std::abs(modes_[k].ell);
          const double radial =
              constants_[k] * upow[a] * laguerre[static_cast<std::size_t>(a) * (max_p_ + 1) + modes_[k].p];
          const cdouble azimuth = modes_[k].ell >= 0 ? epow[a] : std::conj(epow[a]);
          sink(pixel, k, radial * envelope * azimuth);
        }
      }
    }
  }

 private:
  std::vector<LGIndex> modes_;
  GridSpec grid_;
  BeamParameters beam_;
  std::vector<double> constants_;
  int max_abs_ell_ = 0;
  int max_p_ = 0;
};

}  // namespace

SampledField lg_mode_field(LGIndex idx, double waist, double wavelength, const GridSpec& grid,
                           double z) {
  if (idx.p < 0) throw std::invalid_argument("radial index must be non-negative");
  SampledField field(grid, wavelength, z);
  const LGIndex modes[] = {idx};
  ModeEvaluator eval(modes, waist, wavelength, grid, z);
  const cdouble gouy = eval.gouy_factor(0);
  eval.sweep([&](std::size_t pixel, std::size_t, cdouble v) { field.amplitude[pixel] = v * gouy; });
  const double scale = 1.0 / std::sqrt(field.power());
  for (auto& a : field.amplitude) a *= scale;
  return field;
}

cdouble inner_product(const SampledField& a, const SampledField& b) {
  if (!(a.grid == b.grid)) throw GridMismatch("inner_product: grids differ");
  cdouble sum{};
  for (std::size_t k = 0; k < a.amplitude.size(); ++k)
    sum += std::conj(a.amplitude[k]) * b.amplitude[k];
  return sum * (a.grid.spacing() * a.grid.spacing());
}

Eigen::VectorXcd decompose(const SampledField& field, const ModeBasis& basis) {
  const std::size_t count = basis.size();
  ModeEvaluator eval(basis.indices, basis.waist, field.wavelength, field.grid, field.z);
  std::vector<cdouble> overlap(count, cdouble{});
  std::vector<double> norm(count, 0.0);
  const auto& f = field.amplitude;
  eval.sweep([&](std::size_t pixel, std::size_t k, cdouble v) {
    overlap[k] += std::conj(v) * f[pixel];
    norm[k] += std::norm(v);
  });
  Eigen::VectorXcd coeffs(static_cast<Eigen::Index>(count));
  const double dx = field.grid.spacing();
  for (std::size_t k = 0; k < count; ++k) {
    // <mode|f> with mode = v * gouy / sqrt(norm * dx^2)
    coeffs[static_cast<Eigen::Index>(k)] =
        std::conj(eval.gouy_factor(k)) * overlap[k] * dx / std::sqrt(norm[k]);
  }
  return coeffs;
}

SampledField free_space_step(const SampledField& field, double dz) {
  if (dz < 0.0) throw std::invalid_argument("free_space_step requires dz >= 0");
  SampledField out = field;
  if (dz == 0.0) return out;
  const int n = field.grid.n;
  const Fft2d fft(n);
  fft.forward(out.amplitude);
  const double dk = 2.0 * kPi / field.grid.window;
  const double factor = -dz / (2.0 * field.wavenumber());
  std::vector<double> k2(n);
  for (int i = 0; i < n; ++i) {
    const double k = (i < n / 2 ? i : i - n) * dk;
    k2[i] = k * k;
  }
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      out.amplitude[static_cast<std::size_t>(j) * n + i] *= std::polar(1.0, factor * (k2[i] + k2[j]));
  fft.inverse(out.amplitude);
  out.z = field.z + dz;
  return out;
}

void Absorber::apply(SampledField& field) const {
  if (!enabled) return;
  const auto& g = field.grid;
  const double radius = radius_fraction * g.window;
  for (int j = 0; j < g.n; ++j) {
    const double y = g.coordinate(j);
    for (int i = 0; i < g.n; ++i) {
      const double x = g.coordinate(i);
      const double s = (x * x + y * y) / (radius * radius);
      field.at(i, j) *= std::exp(-std::pow(s, order));
    }
  }
}

double second_moment_radius(const SampledField& field) {
  const auto& g = field.grid;
  double total = 0.0, cx = 0.0, cy = 0.0;
  for (int j = 0; j < g.n; ++j)
    for (int i = 0; i < g.n; ++i) {
      const double w = std::norm(field.at(i, j));
      total += w;
      cx += w * g.coordinate(i);
      cy += w * g.coordinate(j);
    }
  cx /= total;
  cy /= total;
  double sxx = 0.0, syy = 0.0;
  for (int j = 0; j < g.n; ++j)
    for (int i = 0; i < g.n; ++i) {
      const double w = std::norm(field.at(i, j));
      const double dx = g.coordinate(i) - cx;
      const double dy = g.coordinate(j) - cy;
      sxx += w * dx * dx;
      syy += w * dy * dy;
    }
  return 2.0 * std::sqrt(0.5 * (sxx + syy) / total);
}

}  // namespace oamc
