#include "doctest.h"

#include "oamc/turbulence.hpp"

#include <cmath>
#include <numeric>

using namespace oamc;

TEST_CASE("Kolmogorov spectrum values") {
  CHECK(kolmogorov_psd(0.0, 1e-16) == 0.0);
  CHECK(kolmogorov_psd(200.0, 1e-16) / kolmogorov_psd(100.0, 1e-16) ==
        doctest::Approx(std::pow(2.0, -11.0 / 3.0)).epsilon(1e-14));
  // 0.033e-16 * 10^(-22/3), evaluated by hand
  CHECK(kolmogorov_psd(100.0, 1e-16) == doctest::Approx(1.5317243152e-25).epsilon(1e-9));
  const double k_ref = 2.0 * kPi / 1e-6;
  CHECK(phase_psd(100.0, 1e-16, k_ref, 500.0) ==
        doctest::Approx(2.0 * kPi * k_ref * k_ref * 500.0 * 1.5317243152e-25).epsilon(1e-9));
}

TEST_CASE("Fried parameter and scintillation strength at the reference geometry") {
  const double z = 2.0 * kPi * 0.1 * 0.1 / 1e-6;  // 2 z_R
  const double r0 = fried_parameter(1e-16, z, 1e-6);
  CHECK(r0 == doctest::Approx(0.0614).epsilon(0.005));
  CHECK(scintillation_strength(0.1, r0) == doctest::Approx(1.63).epsilon(0.005));
  CHECK(fried_parameter(1e-16, 2 * z, 1e-6) / r0 == doctest::Approx(std::pow(2.0, -0.6)).epsilon(1e-12));
  CHECK(fried_parameter(1e-16 / std::pow(2.0, 5.0 / 3.0), z, 1e-6) / r0 == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(scintillation_strength(0.1, 0.2) == doctest::Approx(0.5));
  CHECK(scintillation_strength(0.1, 0.05) == doctest::Approx(2.0));
  CHECK_THROWS_AS(fried_parameter(0.0, z, 1e-6), std::invalid_argument);
}

TEST_CASE("path length for a target W") {
  const double z = 2.0 * kPi * 0.1 * 0.1 / 1e-6;
  const double w_ref = scintillation_strength(0.1, fried_parameter(1e-16, z, 1e-6));
  CHECK(solve_z_for_w(0.1, 1e-16, 1e-6, w_ref) == doctest::Approx(z).epsilon(1e-6));
  const double z05 = solve_z_for_w(0.1, 1e-16, 1e-6, 0.5);
  CHECK(z05 == doctest::Approx(z * std::pow(0.5 / w_ref, 5.0 / 3.0)).epsilon(1e-9));
  for (double w : {0.25, 0.5, 1.0, 2.0, 3.7}) {
    const double zw = solve_z_for_w(0.1, 1e-16, 1e-6, w);
    CHECK(scintillation_strength(0.1, fried_parameter(1e-16, zw, 1e-6)) == doctest::Approx(w).epsilon(1e-9));
  }
  CHECK_THROWS_AS(solve_z_for_w(0.1, 1e-16, 1e-6, 0.0), std::invalid_argument);
}

TEST_CASE("slab planning") {
  TurbulenceParams calm{1e-20, 1000.0, 1e-6, 3};
  const auto slabs = plan_slabs(calm);
  REQUIRE(slabs.size() == 2);
  CHECK(slabs[0] == doctest::Approx(500.0));
  CHECK(slabs[1] == doctest::Approx(500.0));

  TurbulenceParams ref;
  ref.path_length = 2.0 * kPi * 0.1 * 0.1 / 1e-6;
  const auto plan = plan_slabs(ref);
  const double k = 2.0 * kPi / 1e-6;
  // oracle: first even count meeting the bound, evaluated directly
  std::size_t expected = 2;
  while (1.23 * ref.cn2 * std::pow(k, 7.0 / 6.0) * std::pow(ref.path_length / expected, 11.0 / 6.0) > 0.1)
    expected += 2;
  CHECK(plan.size() == expected);
  CHECK(plan.size() == 10);
  CHECK(std::accumulate(plan.begin(), plan.end(), 0.0) == doctest::Approx(ref.path_length).epsilon(1e-12));
  for (double dz : plan) CHECK(rytov_variance(ref.cn2, k, dz) <= kMaxSlabRytov);
  CHECK(rytov_variance(ref.cn2, k, ref.path_length / (expected - 2)) > kMaxSlabRytov);
}

TEST_CASE("screens are zero-mean, deterministic, and pairs are uncorrelated") {
  const GridSpec grid{128, 1.6};
  TurbulenceParams params;
  params.subharmonic_levels = 0;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  Rng rng(42);
  for (int i = 0; i < 200; ++i) {
    auto [a, b] = generate_screen_pair(grid, params, 5000.0, rng);
    CHECK(std::abs(a.mean()) < 1e-6);
    CHECK(std::abs(b.mean()) < 1e-6);
    for (std::size_t k = 0; k < a.values.size(); ++k) {
      sab += a.values[k] * b.values[k];
      saa += a.values[k] * a.values[k];
      sbb += b.values[k] * b.values[k];
    }
  }
  CHECK(std::abs(sab) / std::sqrt(saa * sbb) < 0.05);

  params.subharmonic_levels = 3;
  Rng r1(7), r2(7);
  const auto p1 = generate_screen_pair(grid, params, 5000.0, r1);
  const auto p2 = generate_screen_pair(grid, params, 5000.0, r2);
  CHECK(p1.first.values == p2.first.values);
  CHECK(p1.second.values == p2.second.values);
  CHECK(std::abs(p1.first.mean()) < 1e-6);
}

TEST_CASE("screen variance is linear in cn2") {
  const GridSpec grid{128, 1.6};
  TurbulenceParams weak, strong;
  strong.cn2 = 4.0 * weak.cn2;
  double vw = 0.0, vs = 0.0;
  for (int i = 0; i < 50; ++i) {
    Rng a(100 + i), b(100 + i);
    const auto sw = generate_screen_pair(grid, weak, 2000.0, a).first;
    const auto ss = generate_screen_pair(grid, strong, 2000.0, b).first;
    for (double v : sw.values) vw += v * v;
    for (double v : ss.values) vs += v * v;
  }
  CHECK(vs / vw == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("sub-harmonics with zero levels are a no-op and add low-order power otherwise") {
  const GridSpec grid{128, 1.6};
  TurbulenceParams params;
  params.subharmonic_levels = 0;
  Rng rng(3);
  const auto base = generate_screen_pair(grid, params, 2000.0, rng).first;
  Rng sub(4);
  CHECK(add_subharmonics(base, 0, params, sub).values == base.values);

  // Shared FFT part, with and without sub-harmonics: the large-separation
  // structure function must grow once the low frequencies are restored.
  StructureFunctionAccumulator plain(grid.n, {32}), boosted(grid.n, {32});
  for (int i = 0; i < 60; ++i) {
    Rng r(1000 + i);
    const auto s = generate_screen_pair(grid, params, 2000.0, r).first;
    Rng rs(5000 + i);
    plain.add(s.values);
    boosted.add(add_subharmonics(s, 3, params, rs).values);
  }
  CHECK(boosted.mean()[0] > plain.mean()[0]);
}

TEST_CASE("structure function accumulator on a known ramp") {
  const int n = 64;
  std::vector<double> ramp(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) ramp[static_cast<std::size_t>(j) * n + i] = 0.5 * i + 2.0 * j;
  StructureFunctionAccumulator acc(n, {1, 3});
  acc.add(ramp);
  acc.add(ramp);
  CHECK(acc.count() == 2);
  // x: (0.5 s)^2, y: (2 s)^2, mean of the two
  CHECK(acc.mean_x()[0] == doctest::Approx(0.25));
  CHECK(acc.mean_y()[1] == doctest::Approx(36.0));
  CHECK(acc.mean()[0] == doctest::Approx(0.5 * (0.25 + 4.0)));
  CHECK(acc.mean_diagonal()[0] == doctest::Approx(6.25));
  CHECK(acc.standard_error()[0] == doctest::Approx(0.0));
  CHECK(kolmogorov_structure_function(0.2, 0.2) == doctest::Approx(6.88));
}

TEST_CASE("realizations cover the path and reproduce from the seed") {
  const GridSpec grid{128, 1.6};
  TurbulenceParams params;
  params.path_length = 20000.0;
  const auto a = generate_realization(grid, params, 99);
  const auto b = generate_realization(grid, params, 99);
  const auto c = generate_realization(grid, params, 100);
  REQUIRE(a.screens.size() == plan_slabs(params).size());
  double total = 0.0;
  for (std::size_t s = 0; s < a.screens.size(); ++s) {
    total += a.screens[s].dz_slab;
    CHECK(a.screens[s].values == b.screens[s].values);
  }
  CHECK(total == doctest::Approx(params.path_length));
  CHECK(a.screens[0].values != c.screens[0].values);
}
