#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace oamc {

using cdouble = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Square sampling grid. Sample (i, j) sits at x = (i - n/2) * spacing,
// y = (j - n/2) * spacing; storage is row-major with j as the row.
struct GridSpec {
  int n = 1024;
  double window = 1.6;  // side length, meters

  double spacing() const noexcept { return window / n; }
  double coordinate(int i) const noexcept { return (i - n / 2) * spacing(); }
  std::size_t samples() const noexcept { return static_cast<std::size_t>(n) * n; }

  // Throws std::invalid_argument unless n is a power of two >= 64 and window > 0.
  void validate() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct SampledField {
  GridSpec grid;
  double wavelength = 1e-6;
  double z = 0.0;
  std::vector<cdouble> amplitude;

  SampledField() = default;
  SampledField(GridSpec g, double lambda, double z_plane);

  double wavenumber() const noexcept { return 2.0 * kPi / wavelength; }
  cdouble& at(int i, int j) { return amplitude[static_cast<std::size_t>(j) * grid.n + i]; }
  cdouble at(int i, int j) const { return amplitude[static_cast<std::size_t>(j) * grid.n + i]; }

  // Discrete L2 norm squared, sum |a|^2 * spacing^2.
  double power() const;
};

struct LGIndex {
  int ell = 0;
  int p = 0;

  friend bool operator==(const LGIndex&, const LGIndex&) = default;
};

// Ordered set of LG modes sharing one waist. The wavelength and plane come
// from the field the basis is applied to, so a single ModeBasis serves every
// wavelength branch.
struct ModeBasis {
  double waist = 0.1;
  std::vector<LGIndex> indices;

  // Row-major over p then ell: all ell values for p_values[0], then p_values[1], ...
  static ModeBasis grid(double waist, std::span<const int> p_values, int ell_min, int ell_max);

  std::size_t size() const noexcept { return indices.size(); }
  // Position of idx in the ordering, or -1.
  int find(LGIndex idx) const noexcept;
  // Throws std::invalid_argument on duplicates or negative p.
  void validate() const;
};

// Gaussian-beam parameters of a waist-w0 beam at distance z from the waist.
struct BeamParameters {
  double rayleigh_range;
  double radius;        // w(z)
  double gouy;          // atan(z / zR)
  double curvature_k;   // k / (2 R(z)); zero at the waist

  static BeamParameters at(double waist, double wavelength, double z);
};

double rayleigh_range(double waist, double wavelength);

// LG mode (ell, p) of waist `waist` evaluated at plane z (0 = waist plane),
// including curvature and Gouy phase, discrete-normalized to unit power.
// Throws UnresolvedMode when the waist spans fewer than 8 samples or the
// waist is not below window/4, or when the mode's rms radius exceeds 0.45 window.
SampledField lg_mode_field(LGIndex idx, double waist, double wavelength, const GridSpec& grid,
                           double z = 0.0);

// <a|b> = sum conj(a) b spacing^2. Throws GridMismatch.
cdouble inner_product(const SampledField& a, const SampledField& b);

// Overlaps of the field with every basis mode evaluated at the field's own
// wavelength and plane. Each mode is discrete-normalized before projection.
Eigen::VectorXcd decompose(const SampledField& field, const ModeBasis& basis);

// Paraxial angular-spectrum step: multiplies the spectrum by
// exp(-i (kx^2 + ky^2) dz / (2 k0)). Requires dz >= 0.
SampledField free_space_step(const SampledField& field, double dz);

// Smooth circular super-Gaussian border, exp(-(r/R)^(2*order)), R = radius_fraction * window.
struct Absorber {
  bool enabled = false;
  int order = 8;
  double radius_fraction = 0.45;

  void apply(SampledField& field) const;
};

// 1/e^2 intensity radius from the second moment, w = 2 sqrt(<x^2>) averaged
// over x and y about the centroid.
double second_moment_radius(const SampledField& field);

}  // namespace oamc
