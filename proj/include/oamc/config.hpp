#pragma once

#include "oamc/channel_sim.hpp"
#include "oamc/correction.hpp"
#include "oamc/tomography.hpp"
#include "oamc/turbulence.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace oamc {

struct OutputBasisConfig {
  std::vector<int> p_values{0, 1, 2, 3, 4, 5, 6};
  int ell_min = -14;
  int ell_max = 15;
  bool input_only = false;

  OutputBasisSpec build(const InputStateSpec& input) const;
};

struct TomographyConfig {
  double m_fraction = 0.05;
  ReconstructionConfig reconstruction;
  double noise_sigma = 0.0;
  ExtractionOptions extraction;

  // round(m_fraction * d^2), raised to at least 4d (a pure state of dimension d
  // is not identifiable from fewer than 4d - 4 generic records), clamped to d^2.
  std::int64_t measurement_count(int d) const;
};

// Ensemble used to compare screen statistics against Kolmogorov theory.
// Sizes are in pixels of an n x n grid; r0 is fixed in pixels and cn2 is
// derived from it for the configured slab.
struct ScreenValidationConfig {
  int n = 2048;
  double window = 2.0;
  double r0_pixels = 4.0;
  int screens = 500;
  double dz_slab = 1000.0;
  double wavelength = 1e-6;
  std::vector<int> shifts{2, 3, 4, 5, 6, 7, 8};
  std::vector<int> subharmonic_levels{0, 3};
  std::uint64_t seed = 1;

  double r0() const { return r0_pixels * window / n; }
  double cn2() const;
  void validate() const;
};

struct ExperimentConfig {
  GridSpec grid{1024, 3.2};
  InputStateSpec input;
  TurbulenceParams turbulence{1e-16, 62831.853071795864, 1e-6, 3};
  std::optional<double> target_w;  // when set, overrides turbulence.path_length
  OutputBasisConfig output;
  TomographyConfig tomography;
  PropagationOptions propagation;
  int realizations = 100;
  std::uint64_t seed = 1;
  int threads = 1;
  std::vector<double> sweep_w{0.5, 1.0, 2.0};
  std::vector<int> sweep_nout{9, 90, 180, 630};
  ScreenValidationConfig screens;

  // Turbulence with path_length resolved from target_w when present.
  TurbulenceParams effective_turbulence() const;
  double scintillation() const;  // W = waist / r0 at the reference wavelength
  OutputBasisSpec output_basis() const { return output.build(input); }
  // Copy whose output basis has total dimension n_out. n_out = 9 maps to the
  // input modes alone; otherwise n_out / 3 must be a multiple of the azimuthal
  // range width and radial orders 0, 1, ... are taken in turn.
  ExperimentConfig with_output_dim(int n_out) const;
  ExperimentConfig with_target_w(double w) const;

  // Throws ConfigError.
  void validate() const;
};

ExperimentConfig paper_preset();
ExperimentConfig desk_preset();
ExperimentConfig preset(std::string_view name);

void to_json(nlohmann::json& j, const ExperimentConfig& c);
// Keys absent from j keep the values already in `base`; unknown keys are
// rejected with ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = paper_preset());
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = paper_preset());

}  // namespace oamc
