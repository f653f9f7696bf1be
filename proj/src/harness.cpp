#include "oamc/harness.hpp"

#include "oamc/errors.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace oamc {

std::uint64_t child_seed(std::uint64_t master, std::uint64_t index, SeedPurpose purpose) {
  // splitmix64 finalizer applied to a combination of the three inputs
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::uint64_t h = mix(master);
  h = mix(h ^ index);
  h = mix(h ^ static_cast<std::uint64_t>(purpose));
  return h;
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  if (count <= 0) return;
  const int workers = std::max(1, std::min(threads, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first) first = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

SimulationArtifacts simulate_realization(const ExperimentConfig& config, int index) {
  SimulationArtifacts a;
  const auto params = config.effective_turbulence();
  a.basis = config.output_basis();
  a.turbulence = generate_realization(config.grid, params,
                                      child_seed(config.seed, static_cast<std::uint64_t>(index), SeedPurpose::Turbulence));
  a.branches = propagate_all_branches(config.input, a.turbulence, config.grid, config.propagation.absorber);
  a.choi = assemble_choi(config.input, a.basis, a.branches, config.propagation.capture_floor);
  return a;
}

ReportRow run_realization(const ExperimentConfig& config, const GGMBasis& basis, int index) {
  ReportRow row;
  row.seed = child_seed(config.seed, static_cast<std::uint64_t>(index), SeedPurpose::Turbulence);
  const OutputBasisSpec output = config.output_basis();
  row.n_out = output.total_dim();
  row.m = config.tomography.measurement_count(row.n_out);
  try {
    row.w = config.scintillation();
    if (basis.dim() != row.n_out) throw DimensionMismatch("GGM basis does not match the output dimension");
    const auto params = config.effective_turbulence();
    const auto turbulence = generate_realization(config.grid, params, row.seed);
    const ChoiResult choi = propagate_choi(config.input, output, turbulence, config.grid, config.propagation);

    Rng rng(child_seed(config.seed, static_cast<std::uint64_t>(index), SeedPurpose::Measurement));
    const auto indices = sample_measurement_set(row.n_out, row.m, rng);
    const auto records = measure_state(choi.state, basis, indices, config.tomography.noise_sigma,
                                       config.tomography.noise_sigma > 0.0 ? &rng : nullptr);
    ReconstructionResult rec;
    try {
      rec = reconstruct(records, basis, config.tomography.reconstruction);
    } catch (const NotConverged& e) {
      row.iterations = e.result().iterations;
      row.residual = e.result().residual;
      throw;
    }
    row.iterations = rec.iterations;
    row.residual = rec.residual;

    const StateVector psi = extract_state_vector(rec.rho, config.tomography.extraction);
    const KrausAssembly kraus = assemble_kraus(psi, kQutrit);
    const DensityMatrix rho_out = DensityMatrix::pure(choi.state);
    const DensityMatrix corrected = correct_state(rho_out, kraus.kraus, kQutrit);
    const DensityMatrix uncorrected = truncate_to_input_subspace(rho_out, config.input, output);
    row.report = evaluate_states(corrected, uncorrected, build_input_state(config.input), kQutrit, kQutrit);
    row.report.extraction_method = config.tomography.extraction.method;
    row.report.kraus_isometry_error = choi.ground_truth.isometry_error();
  } catch (const Error& e) {
    row.status = e.kind();
    row.message = e.what();
  }
  return row;
}

bool ExperimentResult::all_ok() const {
  for (const auto& r : rows)
    if (!r.ok()) return false;
  return true;
}

namespace {

std::map<std::string, double> group_keys(const ExperimentConfig& config) {
  return {{"W", config.scintillation()}, {"N_out", static_cast<double>(config.output_basis().total_dim())}};
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const GGMBasis basis(config.output_basis().total_dim());
  ExperimentResult result;
  result.rows.resize(static_cast<std::size_t>(config.realizations));
  parallel_for(config.realizations, config.threads,
               [&](int i) { result.rows[static_cast<std::size_t>(i)] = run_realization(config, basis, i); });
  result.summary = summarize(result.rows, group_keys(config));
  return result;
}

bool SweepResult::all_ok() const {
  for (const auto& r : runs)
    if (!r.all_ok()) return false;
  return true;
}

std::vector<ReportRow> SweepResult::rows() const {
  std::vector<ReportRow> out;
  for (const auto& r : runs) out.insert(out.end(), r.rows.begin(), r.rows.end());
  return out;
}

SweepResult sweep_nout(const ExperimentConfig& config, const std::vector<int>& n_out_values) {
  SweepResult s;
  for (int n : n_out_values) {
    // Truncation loss is the swept quantity here, so the capture floor is not applied.
    auto c = config.with_output_dim(n);
    c.propagation.capture_floor = 0.0;
    s.runs.push_back(run_experiment(c));
    s.summary.append(s.runs.back().summary);
  }
  return s;
}

SweepResult sweep_w(const ExperimentConfig& config, const std::vector<double>& w_values) {
  SweepResult s;
  for (double w : w_values) {
    s.runs.push_back(run_experiment(config.with_target_w(w)));
    s.summary.append(s.runs.back().summary);
  }
  return s;
}

ScreenValidationResult validate_screens(const ScreenValidationConfig& config, int threads) {
  config.validate();
  const GridSpec grid{config.n, config.window};
  TurbulenceParams params;
  params.cn2 = config.cn2();
  params.reference_wavelength = config.wavelength;
  params.subharmonic_levels = 0;
  params.path_length = config.dz_slab;

  const int pairs = (config.screens + 1) / 2;
  std::vector<StructureFunctionAccumulator> acc;
  for (std::size_t k = 0; k < config.subharmonic_levels.size(); ++k) acc.emplace_back(config.n, config.shifts);

  // Screens are generated in parallel batches and accumulated in index order.
  const int batch = std::max(1, threads);
  int added = 0;
  for (int start = 0; start < pairs; start += batch) {
    const int count = std::min(batch, pairs - start);
    std::vector<std::vector<std::vector<double>>> produced(static_cast<std::size_t>(count));
    parallel_for(count, threads, [&](int b) {
      const int pair = start + b;
      Rng rng(child_seed(config.seed, static_cast<std::uint64_t>(pair), SeedPurpose::Screens));
      auto [first, second] = generate_screen_pair(grid, params, config.dz_slab, rng);
      auto& out = produced[static_cast<std::size_t>(b)];
      for (std::size_t k = 0; k < config.subharmonic_levels.size(); ++k) {
        const int levels = config.subharmonic_levels[k];
        Rng sub(child_seed(config.seed, static_cast<std::uint64_t>(pair),
                           static_cast<SeedPurpose>(static_cast<std::uint64_t>(SeedPurpose::Subharmonics) + 16 * k)));
        out.push_back(add_subharmonics(first, levels, params, sub).values);
        out.push_back(add_subharmonics(second, levels, params, sub).values);
      }
    });
    for (int b = 0; b < count; ++b) {
      const auto& out = produced[static_cast<std::size_t>(b)];
      const int take = std::min(2, config.screens - added);
      for (std::size_t k = 0; k < config.subharmonic_levels.size(); ++k)
        for (int s = 0; s < take; ++s) acc[k].add(out[2 * k + static_cast<std::size_t>(s)]);
      added += take;
    }
  }

  ScreenValidationResult result;
  result.r0 = config.r0();
  const double dx = grid.spacing();
  for (std::size_t k = 0; k < config.subharmonic_levels.size(); ++k) {
    const auto mean = acc[k].mean();
    const auto err = acc[k].standard_error();
    double worst = 0.0;
    for (std::size_t i = 0; i < config.shifts.size(); ++i) {
      StructureFunctionRow row;
      row.n_s = config.subharmonic_levels[k];
      row.r = config.shifts[i] * dx;
      row.d_measured = mean[i];
      row.d_analytic = kolmogorov_structure_function(row.r, result.r0);
      row.rel_error = (row.d_measured - row.d_analytic) / row.d_analytic;
      row.stderr_ = err[i];
      if (row.r >= 0.5 * result.r0 - 1e-12 && row.r <= 2.0 * result.r0 + 1e-12)
        worst = std::max(worst, std::abs(row.rel_error));
      result.rows.push_back(row);
    }
    result.max_abs_rel_error[config.subharmonic_levels[k]] = worst;
  }
  return result;
}

}  // namespace oamc
