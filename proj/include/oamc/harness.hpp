#pragma once

#include "oamc/config.hpp"
#include "oamc/serialization.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

namespace oamc {

enum class SeedPurpose : std::uint64_t { Turbulence = 1, Measurement = 2, Screens = 3, Subharmonics = 4 };

// Stable 64-bit mix of (master, index, purpose); independent of thread
// scheduling and of how many other children were drawn.
std::uint64_t child_seed(std::uint64_t master, std::uint64_t index, SeedPurpose purpose);

// Runs fn(i) for i in [0, count) on up to `threads` workers pulling indices
// from a shared counter. The first exception escaping fn is rethrown.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

struct SimulationArtifacts {
  TurbulenceRealization turbulence;
  std::vector<SampledField> branches;
  OutputBasisSpec basis;
  ChoiResult choi;
};

// Turbulence, branch fields and Choi state of realization `index`.
SimulationArtifacts simulate_realization(const ExperimentConfig& config, int index);

// Full pipeline for one realization. Failures derived from oamc::Error are
// captured in the row status; the row keeps whatever was computed.
ReportRow run_realization(const ExperimentConfig& config, const GGMBasis& basis, int index);

struct ExperimentResult {
  std::vector<ReportRow> rows;  // realization order
  SummaryTable summary;

  bool all_ok() const;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

struct SweepResult {
  std::vector<ExperimentResult> runs;
  SummaryTable summary;  // grouped by W and N_out

  bool all_ok() const;
  std::vector<ReportRow> rows() const;
};

// Same master seed for every setting, so realizations pair up across runs.
SweepResult sweep_nout(const ExperimentConfig& config, const std::vector<int>& n_out_values);
SweepResult sweep_w(const ExperimentConfig& config, const std::vector<double>& w_values);

struct ScreenValidationResult {
  std::vector<StructureFunctionRow> rows;
  std::map<int, double> max_abs_rel_error;  // per sub-harmonic level count
  double r0 = 0.0;
};

// Structure function of an ensemble of screens for each configured
// sub-harmonic level count. The FFT part of every screen is shared between
// the level counts, so the comparison isolates the sub-harmonics.
ScreenValidationResult validate_screens(const ScreenValidationConfig& config, int threads = 1);

}  // namespace oamc
