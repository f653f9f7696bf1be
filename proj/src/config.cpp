#include "oamc/config.hpp"

#include "oamc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace oamc {

using nlohmann::json;

OutputBasisSpec OutputBasisConfig::build(const InputStateSpec& input) const {
  if (input_only) return OutputBasisSpec::input_only(input);
  return OutputBasisSpec::grid(p_values, ell_min, ell_max);
}

std::int64_t TomographyConfig::measurement_count(int d) const {
  const std::int64_t total = static_cast<std::int64_t>(d) * d;
  const auto m = static_cast<std::int64_t>(std::llround(m_fraction * static_cast<double>(total)));
  return std::min(std::max<std::int64_t>(m, 4 * static_cast<std::int64_t>(d)), total);
}

double ScreenValidationConfig::cn2() const {
  // r0 = (0.423 k^2 cn2 dz)^(-3/5)
  const double k = 2.0 * kPi / wavelength;
  return std::pow(r0(), -5.0 / 3.0) / (0.423 * k * k * dz_slab);
}

void ScreenValidationConfig::validate() const {
  try {
    GridSpec{n, window}.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("screens: ") + e.what());
  }
  if (!(r0_pixels > 0.0)) throw ConfigError("screens: r0_pixels must be positive");
  if (screens < 2) throw ConfigError("screens: need at least two screens");
  if (!(dz_slab > 0.0) || !(wavelength > 0.0)) throw ConfigError("screens: dz and wavelength must be positive");
  if (shifts.empty()) throw ConfigError("screens: shift list is empty");
  for (int s : shifts)
    if (s < 1 || s >= n) throw ConfigError("screens: shifts must lie in [1, n)");
  for (int l : subharmonic_levels)
    if (l < 0) throw ConfigError("screens: sub-harmonic levels must be >= 0");
}

TurbulenceParams ExperimentConfig::effective_turbulence() const {
  TurbulenceParams t = turbulence;
  if (target_w)
    t.path_length = solve_z_for_w(input.waist, t.cn2, t.reference_wavelength, *target_w);
  return t;
}

double ExperimentConfig::scintillation() const {
  const auto t = effective_turbulence();
  return scintillation_strength(input.waist, fried_parameter(t.cn2, t.path_length, t.reference_wavelength));
}

ExperimentConfig ExperimentConfig::with_output_dim(int n_out) const {
  if (n_out < kQutrit || n_out % kQutrit != 0)
    throw ConfigError("output dimension must be a positive multiple of 3");
  ExperimentConfig c = *this;
  const int spatial = n_out / kQutrit;
  if (spatial == kQutrit) {
    c.output.input_only = true;
    return c;
  }
  const int width = output.ell_max - output.ell_min + 1;
  if (width <= 0 || spatial % width != 0)
    throw ConfigError("output dimension " + std::to_string(n_out) + " is not 3 x (radial orders) x " +
                      std::to_string(width));
  c.output.input_only = false;
  c.output.p_values.clear();
  for (int p = 0; p < spatial / width; ++p) c.output.p_values.push_back(p);
  return c;
}

ExperimentConfig ExperimentConfig::with_target_w(double w) const {
  if (!(w > 0.0)) throw ConfigError("target W must be positive");
  ExperimentConfig c = *this;
  c.target_w = w;
  return c;
}

void ExperimentConfig::validate() const {
  try {
    grid.validate();
    input.validate();
    turbulence.validate();
    tomography.reconstruction.validate();
    output_basis().validate(input);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (target_w && !(*target_w > 0.0)) throw ConfigError("target_w must be positive");
  if (!(tomography.m_fraction > 0.0 && tomography.m_fraction <= 1.0))
    throw ConfigError("m_fraction must lie in (0, 1]");
  if (tomography.noise_sigma < 0.0) throw ConfigError("noise_sigma must be >= 0");
  if (!(tomography.extraction.rank_threshold > 0.0)) throw ConfigError("rank_threshold must be positive");
  if (!(propagation.capture_floor >= 0.0 && propagation.capture_floor <= 1.0))
    throw ConfigError("capture_floor must lie in [0, 1]");
  if (propagation.absorber.order < 1 || !(propagation.absorber.radius_fraction > 0.0))
    throw ConfigError("absorber order and radius must be positive");
  if (realizations < 1) throw ConfigError("realizations must be >= 1");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  for (double w : sweep_w)
    if (!(w > 0.0)) throw ConfigError("sweep W values must be positive");
  screens.validate();
}

ExperimentConfig paper_preset() { return ExperimentConfig{}; }

ExperimentConfig desk_preset() {
  ExperimentConfig c;
  c.grid = {512, 16 * c.input.waist};
  c.output.p_values = {0, 1, 2};
  c.output.ell_min = -5;
  c.output.ell_max = 6;
  c.tomography.m_fraction = 0.2;
  c.sweep_nout = {9, 36, 72, 108};
  c.realizations = 20;
  return c;
}

ExperimentConfig preset(std::string_view name) {
  if (name == "paper") return paper_preset();
  if (name == "desk") return desk_preset();
  throw ConfigError("unknown preset: " + std::string(name));
}

namespace {

std::string_view threshold_name(ThresholdMode m) { return m == ThresholdMode::Soft ? "soft" : "hard"; }

ThresholdMode parse_threshold(const std::string& s) {
  if (s == "soft") return ThresholdMode::Soft;
  if (s == "hard") return ThresholdMode::Hard;
  throw ConfigError("threshold must be \"soft\" or \"hard\"");
}

void check_keys(const json& j, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be an object");
  for (const auto& [key, _] : j.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError("unknown key \"" + key + "\" in " + std::string(where));
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void to_json(json& j, const ExperimentConfig& c) {
  j = json{
      {"grid", {{"n", c.grid.n}, {"window", c.grid.window}}},
      {"input",
       {{"ell", c.input.ell_values}, {"wavelengths", c.input.wavelengths}, {"waist", c.input.waist}}},
      {"turbulence",
       {{"cn2", c.turbulence.cn2},
        {"path_length", c.turbulence.path_length},
        {"target_w", c.target_w ? json(*c.target_w) : json(nullptr)},
        {"reference_wavelength", c.turbulence.reference_wavelength},
        {"subharmonic_levels", c.turbulence.subharmonic_levels}}},
      {"output_basis",
       {{"p_values", c.output.p_values},
        {"ell_min", c.output.ell_min},
        {"ell_max", c.output.ell_max},
        {"input_only", c.output.input_only}}},
      {"tomography",
       {{"m_fraction", c.tomography.m_fraction},
        {"epsilon0", c.tomography.reconstruction.epsilon0},
        {"tol", c.tomography.reconstruction.tol},
        {"max_iter", c.tomography.reconstruction.max_iter},
        {"threshold", threshold_name(c.tomography.reconstruction.mode)},
        {"noise_sigma", c.tomography.noise_sigma},
        {"extraction", to_string(c.tomography.extraction.method)},
        {"rank_threshold", c.tomography.extraction.rank_threshold}}},
      {"propagation",
       {{"absorber", c.propagation.absorber.enabled},
        {"absorber_order", c.propagation.absorber.order},
        {"absorber_radius_fraction", c.propagation.absorber.radius_fraction},
        {"capture_floor", c.propagation.capture_floor}}},
      {"realizations", c.realizations},
      {"seed", c.seed},
      {"threads", c.threads},
      {"sweeps", {{"w", c.sweep_w}, {"n_out", c.sweep_nout}}},
      {"screens",
       {{"n", c.screens.n},
        {"window", c.screens.window},
        {"r0_pixels", c.screens.r0_pixels},
        {"screens", c.screens.screens},
        {"dz_slab", c.screens.dz_slab},
        {"wavelength", c.screens.wavelength},
        {"shifts", c.screens.shifts},
        {"subharmonic_levels", c.screens.subharmonic_levels},
        {"seed", c.screens.seed}}},
  };
}

ExperimentConfig config_from_json(const json& j, ExperimentConfig c) {
  try {
    check_keys(j, "config",
               {"preset", "grid", "input", "turbulence", "output_basis", "tomography", "propagation",
                "realizations", "seed", "threads", "sweeps", "screens"});
    if (j.contains("preset")) c = preset(j.at("preset").get<std::string>());
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      check_keys(g, "grid", {"n", "window"});
      read(g, "n", c.grid.n);
      read(g, "window", c.grid.window);
    }
    if (j.contains("input")) {
      const auto& in = j.at("input");
      check_keys(in, "input", {"ell", "wavelengths", "waist"});
      read(in, "ell", c.input.ell_values);
      read(in, "wavelengths", c.input.wavelengths);
      read(in, "waist", c.input.waist);
    }
    if (j.contains("turbulence")) {
      const auto& t = j.at("turbulence");
      check_keys(t, "turbulence", {"cn2", "path_length", "target_w", "reference_wavelength", "subharmonic_levels"});
      read(t, "cn2", c.turbulence.cn2);
      read(t, "path_length", c.turbulence.path_length);
      read(t, "reference_wavelength", c.turbulence.reference_wavelength);
      read(t, "subharmonic_levels", c.turbulence.subharmonic_levels);
      if (t.contains("target_w")) {
        if (t.at("target_w").is_null())
          c.target_w.reset();
        else
          c.target_w = t.at("target_w").get<double>();
      }
    }
    if (j.contains("output_basis")) {
      const auto& o = j.at("output_basis");
      check_keys(o, "output_basis", {"p_values", "ell_min", "ell_max", "input_only"});
      read(o, "p_values", c.output.p_values);
      read(o, "ell_min", c.output.ell_min);
      read(o, "ell_max", c.output.ell_max);
      read(o, "input_only", c.output.input_only);
    }
    if (j.contains("tomography")) {
      const auto& t = j.at("tomography");
      check_keys(t, "tomography",
                 {"m_fraction", "epsilon0", "tol", "max_iter", "threshold", "noise_sigma", "extraction",
                  "rank_threshold"});
      read(t, "m_fraction", c.tomography.m_fraction);
      read(t, "epsilon0", c.tomography.reconstruction.epsilon0);
      read(t, "tol", c.tomography.reconstruction.tol);
      read(t, "max_iter", c.tomography.reconstruction.max_iter);
      if (t.contains("threshold")) c.tomography.reconstruction.mode = parse_threshold(t.at("threshold").get<std::string>());
      read(t, "noise_sigma", c.tomography.noise_sigma);
      if (t.contains("extraction"))
        c.tomography.extraction.method = parse_extraction_method(t.at("extraction").get<std::string>());
      read(t, "rank_threshold", c.tomography.extraction.rank_threshold);
    }
    if (j.contains("propagation")) {
      const auto& p = j.at("propagation");
      check_keys(p, "propagation", {"absorber", "absorber_order", "absorber_radius_fraction", "capture_floor"});
      read(p, "absorber", c.propagation.absorber.enabled);
      read(p, "absorber_order", c.propagation.absorber.order);
      read(p, "absorber_radius_fraction", c.propagation.absorber.radius_fraction);
      read(p, "capture_floor", c.propagation.capture_floor);
    }
    read(j, "realizations", c.realizations);
    read(j, "seed", c.seed);
    read(j, "threads", c.threads);
    if (j.contains("sweeps")) {
      const auto& s = j.at("sweeps");
      check_keys(s, "sweeps", {"w", "n_out"});
      read(s, "w", c.sweep_w);
      read(s, "n_out", c.sweep_nout);
    }
    if (j.contains("screens")) {
      const auto& s = j.at("screens");
      check_keys(s, "screens",
                 {"n", "window", "r0_pixels", "screens", "dz_slab", "wavelength", "shifts", "subharmonic_levels",
                  "seed"});
      read(s, "n", c.screens.n);
      read(s, "window", c.screens.window);
      read(s, "r0_pixels", c.screens.r0_pixels);
      read(s, "screens", c.screens.screens);
      read(s, "dz_slab", c.screens.dz_slab);
      read(s, "wavelength", c.screens.wavelength);
      read(s, "shifts", c.screens.shifts);
      read(s, "subharmonic_levels", c.screens.subharmonic_levels);
      read(s, "seed", c.screens.seed);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  return config_from_json(j, std::move(base));
}

}  // namespace oamc
