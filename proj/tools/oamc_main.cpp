#include "oamc/config.hpp"
#include "oamc/errors.hpp"
#include "oamc/field_io.hpp"
#include "oamc/harness.hpp"
#include "oamc/serialization.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::optional<int> threads;
  std::string preset = "paper";
  std::optional<int> realizations;
  std::optional<double> target_w;
};

oamc::ExperimentConfig resolve_config(const GlobalOptions& g) {
  oamc::ExperimentConfig c = oamc::preset(g.preset);
  if (!g.config_path.empty()) c = oamc::load_config(g.config_path, c);
  if (g.seed) {
    c.seed = *g.seed;
    c.screens.seed = *g.seed;
  }
  if (g.threads) c.threads = *g.threads;
  if (g.realizations) c.realizations = *g.realizations;
  if (g.target_w) c.target_w = *g.target_w;
  c.validate();
  return c;
}

fs::path out_path(const GlobalOptions& g, const std::string& name) {
  fs::create_directories(g.out_dir);
  return fs::path(g.out_dir) / name;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw oamc::FormatError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw oamc::FormatError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw oamc::FormatError(path + ": " + e.what());
  }
}

void write_report(const GlobalOptions& g, const std::vector<oamc::ReportRow>& rows, const oamc::SummaryTable& s) {
  std::ofstream csv(out_path(g, "report.csv"));
  oamc::write_report_csv(csv, rows);
  write_json(out_path(g, "summary.json"), oamc::summary_to_json(s));
  for (const auto& r : rows)
    if (!r.ok()) std::cerr << "realization seed " << r.seed << " N_out " << r.n_out << ": " << r.status << ": " << r.message << '\n';
}

void print_summary(const oamc::SummaryTable& s) {
  for (const auto& e : s.entries) {
    std::cout << e.metric;
    for (const auto& [k, v] : e.group_keys) std::cout << ' ' << k << '=' << v;
    std::cout << " mean=" << e.mean << " stderr=" << e.stderr_ << " count=" << e.count << '\n';
  }
}

int cmd_simulate(const GlobalOptions& g, int index, bool dump_screens) {
  const auto config = resolve_config(g);
  const auto a = oamc::simulate_realization(config, index);
  write_json(out_path(g, "choi.json"), oamc::choi_to_json(a.choi, a.basis));
  for (std::size_t k = 0; k < a.branches.size(); ++k)
    oamc::save_oamf(out_path(g, "branch_" + std::to_string(k) + ".oamf").string(), a.branches[k]);
  if (dump_screens) {
    for (std::size_t s = 0; s < a.turbulence.screens.size(); ++s) {
      const auto& screen = a.turbulence.screens[s];
      std::ofstream out(out_path(g, "screen_" + std::to_string(s) + ".oamf"), std::ios::binary);
      oamc::write_oamf_real(out, screen.grid, a.turbulence.params.reference_wavelength, static_cast<double>(s) * screen.dz_slab, screen.values);
    }
  }
  const int d = a.basis.total_dim();
  const oamc::GGMBasis basis(d);
  oamc::Rng rng(oamc::child_seed(config.seed, static_cast<std::uint64_t>(index), oamc::SeedPurpose::Measurement));
  const auto indices = oamc::sample_measurement_set(d, config.tomography.measurement_count(d), rng);
  const auto records = oamc::measure_state(a.choi.state, basis, indices, config.tomography.noise_sigma,
                                           config.tomography.noise_sigma > 0.0 ? &rng : nullptr);
  std::ofstream csv(out_path(g, "records.csv"));
  oamc::write_records_csv(csv, records);
  std::cout << "N_out=" << d << " captured_power=" << a.choi.captured_power << " W=" << config.scintillation()
            << " slabs=" << a.turbulence.screens.size() << " records=" << records.size() << '\n';
  return 0;
}

int cmd_tomography(const GlobalOptions& g, const std::string& records_path, int dim) {
  const auto config = resolve_config(g);
  if (dim <= 0) dim = config.output_basis().total_dim();
  std::ifstream in(records_path);
  if (!in) throw oamc::FormatError("cannot open " + records_path);
  const auto records = oamc::read_records_csv(in);
  const oamc::GGMBasis basis(dim);
  const auto t0 = std::chrono::steady_clock::now();
  oamc::ReconstructionDiagnostics diag;
  diag.dim = dim;
  diag.records = records.size();
  oamc::ReconstructionResult result;
  int code = 0;
  try {
    result = oamc::reconstruct(records, basis, config.tomography.reconstruction);
  } catch (const oamc::NotConverged& e) {
    result = e.result();
    std::cerr << e.what() << '\n';
    code = 2;
  }
  diag.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  diag.iterations = result.iterations;
  diag.residual = result.residual;
  diag.converged = result.converged;
  write_json(out_path(g, "rho.json"), oamc::matrix_to_json(result.rho.matrix()));
  write_json(out_path(g, "diagnostics.json"), oamc::diagnostics_to_json(diag));
  std::cout << "iterations=" << diag.iterations << " residual=" << diag.residual << " converged=" << diag.converged
            << '\n';
  return code;
}

int cmd_correct(const GlobalOptions& g, const std::string& rho_path, const std::string& choi_path) {
  const auto config = resolve_config(g);
  const json choi_json = read_json(choi_path);
  const auto choi = oamc::choi_from_json(choi_json);
  oamc::OutputBasisSpec basis;
  for (const auto& m : choi_json.at("modes")) basis.modes.push_back({m[0].get<int>(), m[1].get<int>()});
  const oamc::DensityMatrix rho_r(oamc::matrix_from_json(read_json(rho_path)));

  const auto psi = oamc::extract_state_vector(rho_r, config.tomography.extraction);
  const auto kraus = oamc::assemble_kraus(psi, oamc::kQutrit);
  const auto rho_out = oamc::DensityMatrix::pure(choi.state);
  const auto corrected = oamc::correct_state(rho_out, kraus.kraus, oamc::kQutrit);
  const auto uncorrected = oamc::truncate_to_input_subspace(rho_out, config.input, basis);
  auto report = oamc::evaluate_states(corrected, uncorrected, oamc::build_input_state(config.input));
  report.extraction_method = config.tomography.extraction.method;
  report.kraus_isometry_error = choi.ground_truth.isometry_error();

  const json j{{"F_corr", report.fidelity_corrected},
               {"F_unc", report.fidelity_uncorrected},
               {"D_corr", report.trace_distance_corrected},
               {"D_unc", report.trace_distance_uncorrected},
               {"Neg_corr", report.negativity_corrected},
               {"Neg_unc", report.negativity_uncorrected},
               {"extraction", oamc::to_string(report.extraction_method)},
               {"kraus_column_norms", kraus.column_norms},
               {"kraus_isometry_error", report.kraus_isometry_error}};
  write_json(out_path(g, "correction.json"), j);
  write_json(out_path(g, "kraus.json"), oamc::matrix_to_json(kraus.kraus.matrix));
  std::cout << j.dump() << '\n';
  return 0;
}

int cmd_run(const GlobalOptions& g) {
  const auto config = resolve_config(g);
  const auto result = oamc::run_experiment(config);
  write_report(g, result.rows, result.summary);
  print_summary(result.summary);
  return result.all_ok() ? 0 : 2;
}

int cmd_sweep_nout(const GlobalOptions& g, std::vector<int> values) {
  const auto config = resolve_config(g);
  if (values.empty()) values = config.sweep_nout;
  const auto result = oamc::sweep_nout(config, values);
  write_report(g, result.rows(), result.summary);
  print_summary(result.summary);
  return result.all_ok() ? 0 : 2;
}

int cmd_sweep_w(const GlobalOptions& g, std::vector<double> values) {
  const auto config = resolve_config(g);
  if (values.empty()) values = config.sweep_w;
  const auto result = oamc::sweep_w(config, values);
  write_report(g, result.rows(), result.summary);
  print_summary(result.summary);
  return result.all_ok() ? 0 : 2;
}

int cmd_validate_screens(const GlobalOptions& g, std::optional<int> screens) {
  auto config = resolve_config(g);
  if (screens) config.screens.screens = *screens;
  const auto result = oamc::validate_screens(config.screens, config.threads);
  std::ofstream csv(out_path(g, "structure_function.csv"));
  oamc::write_structure_csv(csv, result.rows);
  json summary = json::array();
  for (const auto& [levels, err] : result.max_abs_rel_error) {
    summary.push_back({{"n_s", levels}, {"max_abs_rel_error", err}, {"r0", result.r0}});
    std::cout << "N_s=" << levels << " max |relative error| over [0.5 r0, 2 r0] = " << err << '\n';
  }
  write_json(out_path(g, "structure_summary.json"), summary);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Turbulent OAM channel simulation, compressive tomography and correction"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config_path, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--out-dir", g.out_dir, "Output directory");
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--preset", g.preset, "Base parameter set")->check(CLI::IsMember({"desk", "paper"}));
  app.add_option("--realizations", g.realizations, "Number of turbulence realizations")->check(CLI::PositiveNumber);
  app.add_option("-w,--w", g.target_w, "Target scintillation strength W (sets the path length)")
      ->check(CLI::PositiveNumber);

  int index = 0;
  bool dump_screens = false;
  auto* simulate = app.add_subcommand("simulate", "Simulate one realization and dump fields, Choi state, records");
  simulate->add_option("--index", index, "Realization index")->check(CLI::NonNegativeNumber);
  simulate->add_flag("--dump-screens", dump_screens, "Also write phase screens");

  std::string records_path;
  int dim = 0;
  auto* tomography = app.add_subcommand("tomography", "Reconstruct a density matrix from a records CSV");
  tomography->add_option("--records", records_path, "CSV with columns index,alpha")->required()->check(CLI::ExistingFile);
  tomography->add_option("--dim", dim, "Hilbert-space dimension (default: configured N_out)");

  std::string rho_path, choi_path;
  auto* correct = app.add_subcommand("correct", "Build the Kraus operator from rho and correct the output state");
  correct->add_option("--rho", rho_path, "Reconstructed density matrix JSON")->required()->check(CLI::ExistingFile);
  correct->add_option("--choi", choi_path, "Choi JSON written by simulate")->required()->check(CLI::ExistingFile);

  auto* run = app.add_subcommand("run", "Full pipeline over all realizations");

  std::vector<int> n_out_values;
  auto* nout = app.add_subcommand("sweep-nout", "Repeat the experiment over output dimensions");
  nout->add_option("--n-out", n_out_values, "Output dimensions (default from config)");

  std::vector<double> w_values;
  auto* sw = app.add_subcommand("sweep-w", "Repeat the experiment over scintillation strengths");
  sw->add_option("--w-values", w_values, "W targets (default from config)");

  std::optional<int> screens;
  auto* vs = app.add_subcommand("validate-screens", "Compare screen structure functions against Kolmogorov");
  vs->add_option("--screens", screens, "Ensemble size")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*simulate) return cmd_simulate(g, index, dump_screens);
    if (*tomography) return cmd_tomography(g, records_path, dim);
    if (*correct) return cmd_correct(g, rho_path, choi_path);
    if (*run) return cmd_run(g);
    if (*nout) return cmd_sweep_nout(g, n_out_values);
    if (*sw) return cmd_sweep_w(g, w_values);
    if (*vs) return cmd_validate_screens(g, screens);
  } catch (const oamc::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 1;
  } catch (const oamc::Error& e) {
    std::cerr << e.kind() << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
