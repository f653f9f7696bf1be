#include "oamc/channel_sim.hpp"

#include "oamc/errors.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace oamc {

void InputStateSpec::validate() const {
  std::set<int> ells(ell_values.begin(), ell_values.end());
  if (ells.size() != kQutrit) throw std::invalid_argument("input ell values must be distinct");
  std::set<double> lambdas(wavelengths.begin(), wavelengths.end());
  if (lambdas.size() != kQutrit) throw std::invalid_argument("input wavelengths must be distinct");
  for (double l : wavelengths)
    if (!(l > 0.0)) throw std::invalid_argument("wavelengths must be positive");
  if (!(waist > 0.0)) throw std::invalid_argument("waist must be positive");
}

OutputBasisSpec OutputBasisSpec::grid(std::span<const int> p_values, int ell_min, int ell_max) {
  OutputBasisSpec spec;
  for (int p : p_values)
    for (int ell = ell_min; ell <= ell_max; ++ell) spec.modes.push_back({ell, p});
  return spec;
}

OutputBasisSpec OutputBasisSpec::input_only(const InputStateSpec& spec) {
  OutputBasisSpec out;
  for (int k = 0; k < kQutrit; ++k) out.modes.push_back(spec.mode(k));
  return out;
}

int OutputBasisSpec::find(LGIndex idx) const noexcept {
  for (std::size_t m = 0; m < modes.size(); ++m)
    if (modes[m] == idx) return static_cast<int>(m);
  return -1;
}

void OutputBasisSpec::validate(const InputStateSpec& spec) const {
  std::set<std::pair<int, int>> seen;
  for (const auto& m : modes) {
    if (m.p < 0) throw std::invalid_argument("radial index must be non-negative");
    if (!seen.insert({m.ell, m.p}).second) throw std::invalid_argument("duplicate output mode");
  }
  for (int k = 0; k < kQutrit; ++k)
    if (find(spec.mode(k)) < 0) throw std::invalid_argument("output basis lacks an input mode");
}

StateVector build_input_state(const InputStateSpec& spec) {
  spec.validate();
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(kQutrit * kQutrit);
  for (int k = 0; k < kQutrit; ++k) v[k * kQutrit + k] = 1.0 / std::sqrt(3.0);
  return StateVector(std::move(v));
}

SampledField propagate_branch(LGIndex mode, double wavelength, const TurbulenceRealization& realization,
                              const GridSpec& grid, double waist, const Absorber& absorber) {
  SampledField field = lg_mode_field(mode, waist, wavelength, grid, 0.0);
  const double scale = realization.params.reference_wavelength / wavelength;
  for (const auto& screen : realization.screens) {
    if (!(screen.grid == grid)) throw GridMismatch("phase screen grid differs from field grid");
    for (std::size_t k = 0; k < field.amplitude.size(); ++k)
      field.amplitude[k] *= std::polar(1.0, scale * screen.values[k]);
    field = free_space_step(field, screen.dz_slab);
    absorber.apply(field);
  }
  return field;
}

std::vector<SampledField> propagate_all_branches(const InputStateSpec& spec,
                                                 const TurbulenceRealization& realization,
                                                 const GridSpec& grid, const Absorber& absorber) {
  spec.validate();
  std::vector<SampledField> out;
  for (int k = 0; k < kQutrit; ++k)
    out.push_back(propagate_branch(spec.mode(k), spec.wavelengths[k], realization, grid, spec.waist, absorber));
  return out;
}

ChoiResult assemble_choi(const InputStateSpec& spec, const OutputBasisSpec& basis,
                         std::span<const SampledField> branches, double capture_floor) {
  basis.validate(spec);
  if (branches.size() != kQutrit) throw std::invalid_argument("need one field per wavelength");
  const int modes = basis.spatial_dim();
  const ModeBasis mode_basis = basis.mode_basis(spec.waist);
  ChoiResult result;
  result.ground_truth.matrix.resize(modes, kQutrit);
  Eigen::VectorXcd choi(basis.total_dim());
  for (int k = 0; k < kQutrit; ++k) {
    const Eigen::VectorXcd column = decompose(branches[k], mode_basis);
    result.ground_truth.matrix.col(k) = column;
    for (int m = 0; m < modes; ++m) choi[m * kQutrit + k] = column[m] / std::sqrt(3.0);
  }
  result.captured_power = choi.squaredNorm();
  if (result.captured_power < capture_floor) throw CaptureTooLow(result.captured_power, capture_floor);
  result.state = StateVector(choi / std::sqrt(result.captured_power));
  return result;
}

ChoiResult propagate_choi(const InputStateSpec& spec, const OutputBasisSpec& basis,
                          const TurbulenceRealization& realization, const GridSpec& grid,
                          const PropagationOptions& options) {
  basis.validate(spec);
  const auto branches = propagate_all_branches(spec, realization, grid, options.absorber);
  return assemble_choi(spec, basis, branches, options.capture_floor);
}

DensityMatrix truncate_to_input_subspace(const DensityMatrix& rho, const InputStateSpec& spec,
                                         const OutputBasisSpec& basis) {
  basis.validate(spec);
  if (rho.dim() != basis.total_dim()) throw DimensionMismatch("density matrix does not match output basis");
  std::array<Eigen::Index, kQutrit * kQutrit> rows{};
  for (int n = 0; n < kQutrit; ++n)
    for (int k = 0; k < kQutrit; ++k)
      rows[n * kQutrit + k] = static_cast<Eigen::Index>(basis.find(spec.mode(n))) * kQutrit + k;
  Eigen::MatrixXcd block(kQutrit * kQutrit, kQutrit * kQutrit);
  for (int a = 0; a < kQutrit * kQutrit; ++a)
    for (int b = 0; b < kQutrit * kQutrit; ++b) block(a, b) = rho.matrix()(rows[a], rows[b]);
  const double tr = block.trace().real();
  if (tr < 1e-12) throw ZeroBlock("input-subspace block has vanishing trace");
  return DensityMatrix(block / tr);
}

}  // namespace oamc
