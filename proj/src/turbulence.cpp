#include "oamc/turbulence.hpp"

#include "oamc/fft.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace oamc {

void TurbulenceParams::validate() const {
  if (!(cn2 >= 0.0)) throw std::invalid_argument("cn2 must be non-negative");
  if (!(path_length > 0.0)) throw std::invalid_argument("path length must be positive");
  if (!(reference_wavelength > 0.0)) throw std::invalid_argument("reference wavelength must be positive");
  if (subharmonic_levels < 0) throw std::invalid_argument("sub-harmonic levels must be >= 0");
}

double PhaseScreenBase::mean() const {
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double kolmogorov_psd(double k_mag, double cn2) {
  if (k_mag < 0.0) throw std::invalid_argument("kolmogorov_psd: negative wavenumber");
  if (k_mag == 0.0) return 0.0;
  return 0.033 * cn2 * std::pow(k_mag, -11.0 / 3.0);
}

double phase_psd(double k_mag, double cn2, double k_ref, double dz) {
  return 2.0 * kPi * k_ref * k_ref * dz * kolmogorov_psd(k_mag, cn2);
}

namespace {

void recenter(std::vector<double>& values) {
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  for (auto& v : values) v -= mean;
}

}  // namespace

std::pair<PhaseScreenBase, PhaseScreenBase> generate_screen_pair(const GridSpec& grid,
                                                                 const TurbulenceParams& params,
                                                                 double dz_slab, Rng& rng) {
  if (!(dz_slab > 0.0)) throw std::invalid_argument("slab thickness must be positive");
  grid.validate();
  const int n = grid.n;
  const double dk = 2.0 * kPi / grid.window;
  const double k_ref = params.reference_wavenumber();
  std::normal_distribution<double> normal(0.0, 1.0);

  // Each of re/im of chi has unit variance, so each output screen alone
  // carries the full phase spectrum.
  std::vector<cdouble> spectrum(grid.samples());
  for (int j = 0; j < n; ++j) {
    const double ky = (j < n / 2 ? j : j - n) * dk;
    for (int i = 0; i < n; ++i) {
      const double kx = (i < n / 2 ? i : i - n) * dk;
      const double re = normal(rng);
      const double im = normal(rng);
      const double amp = dk * std::sqrt(phase_psd(std::hypot(kx, ky), params.cn2, k_ref, dz_slab));
      spectrum[static_cast<std::size_t>(j) * n + i] = cdouble(re, im) * amp;
    }
  }
  spectrum[0] = 0.0;
  Fft2d(n).backward(spectrum);

  PhaseScreenBase a{grid, std::vector<double>(grid.samples()), dz_slab};
  PhaseScreenBase b{grid, std::vector<double>(grid.samples()), dz_slab};
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    a.values[k] = spectrum[k].real();
    b.values[k] = spectrum[k].imag();
  }
  recenter(a.values);
  recenter(b.values);
  if (params.subharmonic_levels > 0) {
    a = add_subharmonics(std::move(a), params.subharmonic_levels, params, rng);
    b = add_subharmonics(std::move(b), params.subharmonic_levels, params, rng);
  }
  return {std::move(a), std::move(b)};
}

PhaseScreenBase add_subharmonics(PhaseScreenBase screen, int levels, const TurbulenceParams& params,
                                 Rng& rng) {
  if (levels < 0) throw std::invalid_argument("sub-harmonic levels must be >= 0");
  if (levels == 0) return screen;
  const auto& grid = screen.grid;
  const int n = grid.n;
  const double dk = 2.0 * kPi / grid.window;
  const double k_ref = params.reference_wavenumber();
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<cdouble> ex(n), ey(n);
  double scale = 1.0;
  for (int level = 1; level <= levels; ++level) {
    scale *= 3.0;
    const double dkn = dk / scale;
    for (int q = -1; q <= 1; ++q) {
      for (int p = -1; p <= 1; ++p) {
        if (p == 0 && q == 0) continue;
        const double sigma =
            dkn * std::sqrt(phase_psd(dkn * std::hypot(p, q), params.cn2, k_ref, screen.dz_slab));
        const cdouble c(sigma * normal(rng), sigma * normal(rng));
        for (int i = 0; i < n; ++i) {
          ex[i] = std::polar(1.0, p * dkn * grid.coordinate(i));
          ey[i] = std::polar(1.0, q * dkn * grid.coordinate(i));
        }
        for (int j = 0; j < n; ++j) {
          const cdouble cy = c * ey[j];
          double* row = &screen.values[static_cast<std::size_t>(j) * n];
          for (int i = 0; i < n; ++i) row[i] += (cy * ex[i]).real();
        }
      }
    }
  }
  recenter(screen.values);
  return screen;
}

double fried_parameter(double cn2, double z, double wavelength) {
  if (!(cn2 > 0.0) || !(z > 0.0)) throw std::invalid_argument("fried_parameter needs cn2 > 0 and z > 0");
  return 0.185 * std::pow(wavelength * wavelength / (cn2 * z), 3.0 / 5.0);
}

double scintillation_strength(double waist, double r0) {
  if (!(r0 > 0.0)) throw std::invalid_argument("r0 must be positive");
  return waist / r0;
}

double solve_z_for_w(double waist, double cn2, double wavelength, double target_w) {
  if (!(target_w > 0.0)) throw std::invalid_argument("target W must be positive");
  // waist / (0.185 (l^2/(cn2 z))^(3/5)) = W  =>  z = (W 0.185 / waist)^(5/3) l^2 / cn2
  return std::pow(target_w * 0.185 / waist, 5.0 / 3.0) * wavelength * wavelength / cn2;
}

double rytov_variance(double cn2, double wavenumber, double dz) {
  return 1.23 * cn2 * std::pow(wavenumber, 7.0 / 6.0) * std::pow(dz, 11.0 / 6.0);
}

std::vector<double> plan_slabs(const TurbulenceParams& params) {
  params.validate();
  const double z = params.path_length;
  int count = 2;
  if (params.cn2 > 0.0) {
    const double per_unit = 1.23 * params.cn2 * std::pow(params.reference_wavenumber(), 7.0 / 6.0);
    const double dz_max = std::pow(kMaxSlabRytov / per_unit, 6.0 / 11.0);
    count = std::max(2, static_cast<int>(std::ceil(z / dz_max)));
    if (count % 2) ++count;
    // guard against the ceil landing exactly on the bound from rounding
    while (rytov_variance(params.cn2, params.reference_wavenumber(), z / count) > kMaxSlabRytov)
      count += 2;
  }
  return std::vector<double>(count, z / count);
}

TurbulenceRealization generate_realization(const GridSpec& grid, const TurbulenceParams& params,
                                           std::uint64_t seed) {
  params.validate();
  TurbulenceRealization r;
  r.seed = seed;
  r.params = params;
  Rng rng(seed);
  const auto slabs = plan_slabs(params);
  for (std::size_t s = 0; s < slabs.size(); s += 2) {
    auto [first, second] = generate_screen_pair(grid, params, slabs[s], rng);
    r.screens.push_back(std::move(first));
    r.screens.push_back(std::move(second));
  }
  return r;
}

StructureFunctionAccumulator::StructureFunctionAccumulator(int n, std::vector<int> shifts)
    : n_(n),
      shifts_(std::move(shifts)),
      sum_x_(shifts_.size()),
      sum_y_(shifts_.size()),
      sum_diag_(shifts_.size()),
      sum_sq_(shifts_.size()) {
  for (int s : shifts_)
    if (s <= 0 || s >= n_) throw std::invalid_argument("structure-function shift out of range");
}

void StructureFunctionAccumulator::add(std::span<const double> screen) {
  if (screen.size() != static_cast<std::size_t>(n_) * n_)
    throw std::invalid_argument("screen size mismatch");
  const auto at = [&](int i, int j) { return screen[static_cast<std::size_t>(j) * n_ + i]; };
  for (std::size_t k = 0; k < shifts_.size(); ++k) {
    const int s = shifts_[k];
    double dx = 0.0, dy = 0.0, dd = 0.0;
    for (int j = 0; j < n_; ++j)
      for (int i = 0; i + s < n_; ++i) {
        const double d = at(i + s, j) - at(i, j);
        dx += d * d;
      }
    for (int j = 0; j + s < n_; ++j)
      for (int i = 0; i < n_; ++i) {
        const double d = at(i, j + s) - at(i, j);
        dy += d * d;
      }
    for (int j = 0; j + s < n_; ++j)
      for (int i = 0; i + s < n_; ++i) {
        const double d = at(i + s, j + s) - at(i, j);
        dd += d * d;
      }
    const double pairs = static_cast<double>(n_) * (n_ - s);
    const double mean_xy = 0.5 * (dx + dy) / pairs;
    sum_x_[k] += dx / pairs;
    sum_y_[k] += dy / pairs;
    sum_diag_[k] += dd / (static_cast<double>(n_ - s) * (n_ - s));
    sum_sq_[k] += mean_xy * mean_xy;
  }
  ++count_;
}

std::vector<double> StructureFunctionAccumulator::mean() const {
  std::vector<double> out(shifts_.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = 0.5 * (sum_x_[k] + sum_y_[k]) / count_;
  return out;
}

std::vector<double> StructureFunctionAccumulator::standard_error() const {
  std::vector<double> out(shifts_.size());
  const auto m = mean();
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (count_ < 2) {
      out[k] = std::nan("");
      continue;
    }
    const double var = (sum_sq_[k] - count_ * m[k] * m[k]) / (count_ - 1.0);
    out[k] = std::sqrt(std::max(var, 0.0) / count_);
  }
  return out;
}

std::vector<double> StructureFunctionAccumulator::mean_x() const {
  std::vector<double> out(shifts_.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = sum_x_[k] / count_;
  return out;
}

std::vector<double> StructureFunctionAccumulator::mean_y() const {
  std::vector<double> out(shifts_.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = sum_y_[k] / count_;
  return out;
}

std::vector<double> StructureFunctionAccumulator::mean_diagonal() const {
  std::vector<double> out(shifts_.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = sum_diag_[k] / count_;
  return out;
}

double kolmogorov_structure_function(double r, double r0) {
  return 6.88 * std::pow(r / r0, 5.0 / 3.0);
}

}  // namespace oamc
