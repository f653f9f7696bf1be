#pragma once

#include "oamc/field_optics.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace oamc {

using Rng = std::mt19937_64;

struct TurbulenceParams {
  double cn2 = 1e-16;                   // m^(-2/3)
  double path_length = 62831.853;       // meters
  double reference_wavelength = 1e-6;   // screens are stored as phase at this wavelength
  int subharmonic_levels = 3;

  double reference_wavenumber() const noexcept { return 2.0 * kPi / reference_wavelength; }
  void validate() const;
};

// One thin phase layer, radians at the reference wavenumber, with the slab
// thickness it represents.
struct PhaseScreenBase {
  GridSpec grid;
  std::vector<double> values;
  double dz_slab = 0.0;

  double mean() const;
};

struct TurbulenceRealization {
  std::vector<PhaseScreenBase> screens;  // applied in order, one per slab
  std::uint64_t seed = 0;
  TurbulenceParams params;
};

// Kolmogorov refractive-index spectrum 0.033 cn2 k^(-11/3); 0 at k = 0.
double kolmogorov_psd(double k_mag, double cn2);

// Phase spectrum of a slab of thickness dz at wavenumber k_ref,
// 2 pi k_ref^2 dz Phi_n(k).
double phase_psd(double k_mag, double cn2, double k_ref, double dz);

// FFT-filtered complex Gaussian noise; the real and imaginary parts are two
// independent screens. Sub-harmonics are added to each when
// params.subharmonic_levels > 0.
std::pair<PhaseScreenBase, PhaseScreenBase> generate_screen_pair(const GridSpec& grid,
                                                                 const TurbulenceParams& params,
                                                                 double dz_slab, Rng& rng);

// Adds levels 1..levels of 3x3 sub-harmonic components (centre skipped) and
// re-centres the screen to zero mean. levels == 0 returns the input.
PhaseScreenBase add_subharmonics(PhaseScreenBase screen, int levels, const TurbulenceParams& params,
                                 Rng& rng);

// r0 = 0.185 (lambda^2 / (cn2 z))^(3/5)
double fried_parameter(double cn2, double z, double wavelength);
double scintillation_strength(double waist, double r0);
// Inverse of W(z) = waist / r0(z).
double solve_z_for_w(double waist, double cn2, double wavelength, double target_w);

// Weak-fluctuation plane-wave Rytov variance 1.23 cn2 k^(7/6) dz^(11/6).
double rytov_variance(double cn2, double wavenumber, double dz);
inline constexpr double kMaxSlabRytov = 0.1;

// Smallest even number (>= 2) of equal slabs whose Rytov variance at the
// reference wavenumber is <= kMaxSlabRytov.
std::vector<double> plan_slabs(const TurbulenceParams& params);

TurbulenceRealization generate_realization(const GridSpec& grid, const TurbulenceParams& params,
                                           std::uint64_t seed);

// Ensemble phase structure function accumulated over screens at integer
// pixel shifts, separately along x, y and the diagonal. Differences are
// taken without wrap-around.
class StructureFunctionAccumulator {
 public:
  StructureFunctionAccumulator(int n, std::vector<int> shifts);

  void add(std::span<const double> screen);

  const std::vector<int>& shifts() const noexcept { return shifts_; }
  std::size_t count() const noexcept { return count_; }

  // Mean over x and y directions, per shift, in rad^2.
  std::vector<double> mean() const;
  // Standard error of the x/y mean across screens.
  std::vector<double> standard_error() const;
  std::vector<double> mean_x() const;
  std::vector<double> mean_y() const;
  // Diagonal shift s corresponds to separation s*sqrt(2) pixels.
  std::vector<double> mean_diagonal() const;

 private:
  int n_;
  std::vector<int> shifts_;
  std::size_t count_ = 0;
  std::vector<double> sum_x_, sum_y_, sum_diag_, sum_sq_;
};

// Kolmogorov phase structure function 6.88 (r/r0)^(5/3).
double kolmogorov_structure_function(double r, double r0);

}  // namespace oamc
