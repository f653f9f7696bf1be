#pragma once

#include "oamc/field_optics.hpp"
#include "oamc/quantum.hpp"
#include "oamc/turbulence.hpp"

#include <array>
#include <vector>

namespace oamc {

inline constexpr int kQutrit = 3;

// Three LG(ell, 0) modes, each tied to its own wavelength.
struct InputStateSpec {
  std::array<int, kQutrit> ell_values{-1, 0, 1};
  std::array<double, kQutrit> wavelengths{1.000e-6, 1.020e-6, 1.040e-6};
  double waist = 0.1;

  LGIndex mode(int k) const { return {ell_values[k], 0}; }
  void validate() const;
};

// Output spatial basis (N_A' modes); the wavelength factor keeps N_B = 3.
struct OutputBasisSpec {
  std::vector<LGIndex> modes;

  static OutputBasisSpec grid(std::span<const int> p_values, int ell_min, int ell_max);
  static OutputBasisSpec input_only(const InputStateSpec& spec);

  int spatial_dim() const noexcept { return static_cast<int>(modes.size()); }
  int total_dim() const noexcept { return spatial_dim() * kQutrit; }
  int find(LGIndex idx) const noexcept;
  ModeBasis mode_basis(double waist) const { return {waist, modes}; }
  // Throws std::invalid_argument if an input mode is missing or modes repeat.
  void validate(const InputStateSpec& spec) const;
};

struct PropagationOptions {
  Absorber absorber{true};
  double capture_floor = 0.8;
};

// 9-entry vector with 1/sqrt(3) on the (k, k) slots.
StateVector build_input_state(const InputStateSpec& spec);

// Split-step propagation of LG(mode) at `wavelength` through every slab:
// phase exp(i theta lambda_ref / lambda), free-space step, absorber.
SampledField propagate_branch(LGIndex mode, double wavelength, const TurbulenceRealization& realization,
                              const GridSpec& grid, double waist, const Absorber& absorber = {});

struct ChoiResult {
  StateVector state;           // normalized, dim N_out
  KrausMatrix ground_truth;    // N_A' x 3, raw decomposition coefficients
  double captured_power = 0.0; // norm^2 of the Choi vector before normalization
};

// Throws CaptureTooLow when captured_power < options.capture_floor.
ChoiResult propagate_choi(const InputStateSpec& spec, const OutputBasisSpec& basis,
                          const TurbulenceRealization& realization, const GridSpec& grid,
                          const PropagationOptions& options = {});

// Per-branch fields, for callers that want to dump them.
std::vector<SampledField> propagate_all_branches(const InputStateSpec& spec,
                                                 const TurbulenceRealization& realization,
                                                 const GridSpec& grid, const Absorber& absorber);

// Choi vector assembled from already-propagated branch fields.
ChoiResult assemble_choi(const InputStateSpec& spec, const OutputBasisSpec& basis,
                         std::span<const SampledField> branches, double capture_floor);

// 9x9 block on (input mode, wavelength) indices, trace-renormalized.
// Throws ZeroBlock when the block trace is below 1e-12.
DensityMatrix truncate_to_input_subspace(const DensityMatrix& rho, const InputStateSpec& spec,
                                         const OutputBasisSpec& basis);

}  // namespace oamc
