#include "oamc/channel_sim.hpp"
#include "oamc/config.hpp"
#include "oamc/correction.hpp"
#include "oamc/errors.hpp"
#include "oamc/field_optics.hpp"
#include "oamc/harness.hpp"
#include "oamc/tomography.hpp"
#include "oamc/turbulence.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace oamc;

namespace {

py::array_t<std::complex<double>> field_array(const SampledField& f) {
  py::array_t<std::complex<double>> a({f.grid.n, f.grid.n});
  std::copy(f.amplitude.begin(), f.amplitude.end(), a.mutable_data());
  return a;
}

SampledField field_from(py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast> a,
                        double window, double wavelength, double z) {
  if (a.ndim() != 2 || a.shape(0) != a.shape(1)) throw std::invalid_argument("field must be a square 2-D array");
  SampledField f(GridSpec{static_cast<int>(a.shape(0)), window}, wavelength, z);
  std::copy(a.data(), a.data() + a.size(), f.amplitude.begin());
  return f;
}

std::vector<MeasurementRecord> records_from(const std::vector<std::int64_t>& idx, const std::vector<double>& alpha) {
  if (idx.size() != alpha.size()) throw DimensionMismatch("indices and values differ in length");
  std::vector<MeasurementRecord> r(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) r[i] = {idx[i], alpha[i]};
  return r;
}

py::dict report_dict(const ReportRow& r) {
  py::dict d;
  d["seed"] = r.seed;
  d["W"] = r.w;
  d["N_out"] = r.n_out;
  d["m"] = r.m;
  d["F_corr"] = r.report.fidelity_corrected;
  d["F_unc"] = r.report.fidelity_uncorrected;
  d["D_corr"] = r.report.trace_distance_corrected;
  d["D_unc"] = r.report.trace_distance_uncorrected;
  d["Neg_corr"] = r.report.negativity_corrected;
  d["Neg_unc"] = r.report.negativity_uncorrected;
  d["iterations"] = r.iterations;
  d["residual"] = r.residual;
  d["status"] = r.status;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Turbulent OAM channel simulation, compressive tomography and channel correction";

  py::register_exception<Error>(m, "OamcError", PyExc_RuntimeError);

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init([](int n, double window) { return GridSpec{n, window}; }), py::arg("n") = 1024,
           py::arg("window") = 1.6)
      .def_readwrite("n", &GridSpec::n)
      .def_readwrite("window", &GridSpec::window)
      .def_property_readonly("spacing", &GridSpec::spacing);

  m.def(
      "lg_mode",
      [](int ell, int p, double waist, double wavelength, const GridSpec& grid, double z) {
        return field_array(lg_mode_field({ell, p}, waist, wavelength, grid, z));
      },
      py::arg("ell"), py::arg("p"), py::arg("waist"), py::arg("wavelength"), py::arg("grid"), py::arg("z") = 0.0,
      "Sampled, discretely normalized LG(ell, p) field as an n x n complex array.");

  m.def(
      "free_space_step",
      [](py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast> field, double window,
         double wavelength, double dz) { return field_array(free_space_step(field_from(field, window, wavelength, 0.0), dz)); },
      py::arg("field"), py::arg("window"), py::arg("wavelength"), py::arg("dz"));

  m.def(
      "decompose",
      [](py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast> field, double window,
         double wavelength, double z, double waist, const std::vector<std::pair<int, int>>& modes) {
        ModeBasis basis{waist, {}};
        for (auto [ell, p] : modes) basis.indices.push_back({ell, p});
        return decompose(field_from(field, window, wavelength, z), basis);
      },
      py::arg("field"), py::arg("window"), py::arg("wavelength"), py::arg("z"), py::arg("waist"), py::arg("modes"),
      "Coefficients <LG_k(z)|field> for the listed (ell, p) modes.");

  m.def(
      "phase_screen",
      [](int n, double window, double cn2, double dz, int subharmonic_levels, std::uint64_t seed) {
        TurbulenceParams params;
        params.cn2 = cn2;
        params.subharmonic_levels = subharmonic_levels;
        Rng rng(seed);
        auto pair = generate_screen_pair(GridSpec{n, window}, params, dz, rng);
        py::array_t<double> a({n, n});
        std::copy(pair.first.values.begin(), pair.first.values.end(), a.mutable_data());
        return a;
      },
      py::arg("n"), py::arg("window"), py::arg("cn2"), py::arg("dz"), py::arg("subharmonic_levels") = 3,
      py::arg("seed") = 0, "One Kolmogorov phase screen in radians at 1 um.");

  m.def("fried_parameter", &fried_parameter, py::arg("cn2"), py::arg("z"), py::arg("wavelength"));
  m.def("solve_z_for_w", &solve_z_for_w, py::arg("waist"), py::arg("cn2"), py::arg("wavelength"), py::arg("w"));

  m.def(
      "ggm_element", [](int d, std::int64_t i) { return GGMBasis(d).dense(i); }, py::arg("d"), py::arg("i"),
      "Dense trace-orthonormal generalized Gell-Mann matrix i of dimension d.");

  m.def(
      "sample_measurement_set",
      [](int d, std::int64_t count, std::uint64_t seed) {
        Rng rng(seed);
        return sample_measurement_set(d, count, rng);
      },
      py::arg("d"), py::arg("m"), py::arg("seed") = 0);

  m.def(
      "measure_state",
      [](const Eigen::VectorXcd& psi, const std::vector<std::int64_t>& indices) {
        const GGMBasis basis(static_cast<int>(psi.size()));
        std::vector<double> alpha;
        for (const auto& r : measure_state(StateVector(psi), basis, indices)) alpha.push_back(r.alpha);
        return alpha;
      },
      py::arg("psi"), py::arg("indices"), "Exact expectations <psi|t_i|psi>.");

  m.def(
      "reconstruct",
      [](int d, const std::vector<std::int64_t>& indices, const std::vector<double>& alpha, double epsilon0,
         double tol, int max_iter) {
        ReconstructionConfig cfg;
        cfg.epsilon0 = epsilon0;
        cfg.tol = tol;
        cfg.max_iter = max_iter;
        const auto records = records_from(indices, alpha);
        auto r = reconstruct(records, GGMBasis(d), cfg);
        return py::make_tuple(r.rho.matrix(), r.iterations, r.residual);
      },
      py::arg("d"), py::arg("indices"), py::arg("alpha"), py::arg("epsilon0") = 0.02, py::arg("tol") = 1e-6,
      py::arg("max_iter") = 5000, "Returns (rho, iterations, residual).");

  m.def(
      "extract_state_vector",
      [](const Eigen::MatrixXcd& rho, const std::string& method, double rank_threshold) {
        ExtractionOptions o{parse_extraction_method(method), rank_threshold};
        return extract_state_vector(DensityMatrix(rho), o).entries();
      },
      py::arg("rho"), py::arg("method") = "column-division", py::arg("rank_threshold") = 0.1);

  m.def(
      "assemble_kraus", [](const Eigen::VectorXcd& psi, int nb) { return assemble_kraus(StateVector(psi), nb).kraus.matrix; },
      py::arg("psi_out"), py::arg("wavelengths") = 3);

  m.def(
      "correct_state",
      [](const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& kraus, int nb) {
        return correct_state(DensityMatrix(rho), KrausMatrix{kraus}, nb).matrix();
      },
      py::arg("rho_out"), py::arg("kraus"), py::arg("wavelengths") = 3);

  m.def(
      "fidelity", [](const Eigen::MatrixXcd& rho, const Eigen::VectorXcd& psi) { return fidelity(DensityMatrix(rho), StateVector(psi)); },
      py::arg("rho"), py::arg("target"));
  m.def(
      "trace_distance",
      [](const Eigen::MatrixXcd& rho, const Eigen::VectorXcd& psi) { return trace_distance(DensityMatrix(rho), StateVector(psi)); },
      py::arg("rho"), py::arg("target"));
  m.def(
      "negativity", [](const Eigen::MatrixXcd& rho, int da, int db) { return negativity(DensityMatrix(rho), da, db); },
      py::arg("rho"), py::arg("dim_a"), py::arg("dim_b"));

  m.def(
      "input_state", [] { return build_input_state(InputStateSpec{}).entries(); },
      "The 9-dimensional maximally nonseparable input state.");

  m.def(
      "run_experiment",
      [](const std::string& preset_name, int realizations, std::optional<double> w, std::uint64_t seed, int threads,
         const std::string& config_json) {
        ExperimentConfig c = preset(preset_name);
        if (!config_json.empty()) c = config_from_json(nlohmann::json::parse(config_json), c);
        if (realizations > 0) c.realizations = realizations;
        if (w) c.target_w = *w;
        c.seed = seed;
        c.threads = threads;
        ExperimentResult result;
        {
          py::gil_scoped_release release;
          result = run_experiment(c);
        }
        py::list rows;
        for (const auto& r : result.rows) rows.append(report_dict(r));
        return rows;
      },
      py::arg("preset") = "desk", py::arg("realizations") = 0, py::arg("w") = py::none(), py::arg("seed") = 1,
      py::arg("threads") = 1, py::arg("config_json") = "",
      "Full pipeline; one dict per realization with the report CSV columns.");
}
