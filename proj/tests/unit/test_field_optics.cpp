#include "doctest.h"

#include "oamc/errors.hpp"
#include "oamc/field_optics.hpp"

#include <cmath>

using namespace oamc;

namespace {

const GridSpec kGrid{1024, 1.6};
const double kWaist = 0.1;
const double kLambda = 1e-6;

double max_abs_diff(const SampledField& a, const SampledField& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.amplitude.size(); ++k) m = std::max(m, std::abs(a.amplitude[k] - b.amplitude[k]));
  return m;
}

}  // namespace

TEST_CASE("grid validation") {
  CHECK_NOTHROW(GridSpec{64, 1.0}.validate());
  CHECK_THROWS_AS((GridSpec{100, 1.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((GridSpec{32, 1.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((GridSpec{64, 0.0}.validate()), std::invalid_argument);
  CHECK(GridSpec{512, 1.6}.spacing() == doctest::Approx(1.6 / 512));
}

TEST_CASE("ground mode is a centred Gaussian without phase winding") {
  const auto f = lg_mode_field({0, 0}, kWaist, kLambda, kGrid);
  CHECK(f.power() == doctest::Approx(1.0).epsilon(1e-6));
  const int c = kGrid.n / 2;
  double peak = 0.0;
  int pi = -1, pj = -1;
  for (int j = 0; j < kGrid.n; ++j)
    for (int i = 0; i < kGrid.n; ++i)
      if (std::abs(f.at(i, j)) > peak) {
        peak = std::abs(f.at(i, j));
        pi = i;
        pj = j;
      }
  CHECK(pi == c);
  CHECK(pj == c);
  // analytic peak sqrt(2/pi)/w0
  CHECK(peak == doctest::Approx(std::sqrt(2.0 / kPi) / kWaist).epsilon(1e-4));
  for (int i = 0; i < kGrid.n; i += 37) CHECK(std::abs(std::arg(f.at(i, c))) < 1e-12);
}

TEST_CASE("LG(1,0) has a centre null and 2 pi winding") {
  const auto f = lg_mode_field({1, 0}, kWaist, kLambda, kGrid);
  const int c = kGrid.n / 2;
  CHECK(std::abs(f.at(c, c)) < 1e-12);
  // walk a circle of radius w0 sampled at nearest grid points
  const double r = kWaist / kGrid.spacing();
  double total = 0.0;
  const int steps = 720;
  auto sample = [&](int s) {
    const double t = 2.0 * kPi * s / steps;
    return f.at(c + static_cast<int>(std::lround(r * std::cos(t))), c + static_cast<int>(std::lround(r * std::sin(t))));
  };
  for (int s = 0; s < steps; ++s) total += std::arg(sample(s + 1) / sample(s));
  CHECK(total == doctest::Approx(2.0 * kPi).epsilon(1e-9));
}

TEST_CASE("inner product identities") {
  const auto f = lg_mode_field({2, 1}, kWaist, kLambda, kGrid);
  const auto a = lg_mode_field({1, 0}, kWaist, kLambda, kGrid);
  const auto b = lg_mode_field({-1, 0}, kWaist, kLambda, kGrid);
  CHECK(std::abs(inner_product(f, f) - 1.0) < 1e-10);
  CHECK(std::abs(inner_product(a, b)) < 1e-6);
  SampledField g = f;
  for (auto& v : g.amplitude) v *= cdouble(0.0, 1.0);
  CHECK(std::abs(inner_product(f, g) - cdouble(0.0, 1.0)) < 1e-10);
  CHECK(std::abs(inner_product(a, f) - std::conj(inner_product(f, a))) < 1e-15);
  const auto other = lg_mode_field({0, 0}, kWaist, kLambda, GridSpec{512, 1.6});
  CHECK_THROWS_AS(inner_product(f, other), GridMismatch);
}

TEST_CASE("Gram matrix of a truncated LG basis") {
  const int ps[] = {0, 1, 2};
  const auto basis = ModeBasis::grid(kWaist, ps, -3, 3);
  std::vector<SampledField> modes;
  for (const auto& idx : basis.indices) modes.push_back(lg_mode_field(idx, kWaist, kLambda, kGrid));
  double worst = 0.0;
  for (std::size_t a = 0; a < modes.size(); ++a)
    for (std::size_t b = 0; b < modes.size(); ++b) {
      const cdouble expected = a == b ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(inner_product(modes[a], modes[b]) - expected));
    }
  CHECK(worst < 1e-3);
}

TEST_CASE("mode basis ordering is row-major over p then ell") {
  const int ps[] = {0, 2};
  const auto basis = ModeBasis::grid(kWaist, ps, -1, 1);
  REQUIRE(basis.size() == 6);
  CHECK(basis.indices[0] == LGIndex{-1, 0});
  CHECK(basis.indices[2] == LGIndex{1, 0});
  CHECK(basis.indices[3] == LGIndex{-1, 2});
  CHECK(basis.find({0, 2}) == 4);
  CHECK(basis.find({5, 0}) == -1);
  ModeBasis dup{kWaist, {{0, 0}, {0, 0}}};
  CHECK_THROWS_AS(dup.validate(), std::invalid_argument);
}

TEST_CASE("decomposition selects basis elements and is linear") {
  const int ps[] = {0, 1, 2};
  const auto basis = ModeBasis::grid(kWaist, ps, -3, 3);
  const auto f = lg_mode_field({2, 1}, kWaist, kLambda, kGrid);
  const auto c = decompose(f, basis);
  const int k = basis.find({2, 1});
  for (Eigen::Index i = 0; i < c.size(); ++i) CHECK(std::abs(c[i] - (i == k ? cdouble(1.0) : cdouble(0.0))) < 1e-6);

  auto mix = lg_mode_field({0, 0}, kWaist, kLambda, kGrid);
  const auto one = lg_mode_field({1, 0}, kWaist, kLambda, kGrid);
  for (std::size_t s = 0; s < mix.amplitude.size(); ++s) mix.amplitude[s] = (mix.amplitude[s] + one.amplitude[s]) / std::sqrt(2.0);
  const auto cm = decompose(mix, basis);
  CHECK(std::abs(cm[basis.find({0, 0})] - 1.0 / std::sqrt(2.0)) < 1e-6);
  CHECK(std::abs(cm[basis.find({1, 0})] - 1.0 / std::sqrt(2.0)) < 1e-6);
}

TEST_CASE("unresolved modes are rejected") {
  CHECK_THROWS_AS(lg_mode_field({0, 0}, 0.01, kLambda, GridSpec{64, 1.6}), UnresolvedMode);
  CHECK_THROWS_AS(lg_mode_field({0, 0}, 0.5, kLambda, GridSpec{1024, 1.6}), UnresolvedMode);
  CHECK_THROWS_AS(lg_mode_field({100, 40}, kWaist, kLambda, GridSpec{1024, 1.6}), UnresolvedMode);
}

TEST_CASE("Gaussian width after one Rayleigh range") {
  const auto f = lg_mode_field({0, 0}, kWaist, kLambda, kGrid);
  CHECK(second_moment_radius(f) == doctest::Approx(kWaist).epsilon(1e-3));
  const auto g = free_space_step(f, rayleigh_range(kWaist, kLambda));
  CHECK(second_moment_radius(g) == doctest::Approx(kWaist * std::sqrt(2.0)).epsilon(0.01));
}

TEST_CASE("free-space step is unitary, composes, and has an exact identity") {
  const auto f = lg_mode_field({3, 1}, kWaist, kLambda, kGrid);
  for (double dz : {1.0, 1e3, 2e4, 6e4}) {
    const auto g = free_space_step(f, dz);
    CHECK(std::abs(g.power() / f.power() - 1.0) < 1e-10);
    CHECK(g.z == doctest::Approx(dz));
  }
  const auto same = free_space_step(f, 0.0);
  CHECK(same.amplitude == f.amplitude);
  const auto once = free_space_step(f, 3e4);
  const auto twice = free_space_step(free_space_step(f, 1e4), 2e4);
  CHECK(max_abs_diff(once, twice) < 1e-8);
  CHECK_THROWS_AS(free_space_step(f, -1.0), std::invalid_argument);
}

TEST_CASE("propagated LG modes stay eigenmodes of the propagated basis") {
  const int ps[] = {0, 1, 2};
  const auto basis = ModeBasis::grid(kWaist, ps, -3, 3);
  const double z = 2.0 * rayleigh_range(kWaist, kLambda);
  for (LGIndex idx : {LGIndex{2, 1}, LGIndex{-3, 0}, LGIndex{0, 2}}) {
    const auto g = free_space_step(lg_mode_field(idx, kWaist, kLambda, kGrid), z);
    const auto c = decompose(g, basis);
    CHECK(std::abs(std::abs(c[basis.find(idx)]) - 1.0) < 1e-3);
    // also the phase: propagated field equals the analytic mode at z
    CHECK(std::abs(c[basis.find(idx)] - 1.0) < 1e-3);
  }
}

TEST_CASE("absorber attenuates only the border") {
  auto f = lg_mode_field({0, 0}, kWaist, kLambda, kGrid);
  const auto before = f;
  Absorber off;
  off.apply(f);
  CHECK(f.amplitude == before.amplitude);
  Absorber on{true};
  on.apply(f);
  CHECK(std::abs(f.power() - before.power()) < 1e-10);
  SampledField flat(kGrid, kLambda, 0.0);
  for (auto& v : flat.amplitude) v = 1.0;
  on.apply(flat);
  CHECK(std::abs(flat.at(0, 0)) < 1e-6);
  CHECK(std::abs(flat.at(kGrid.n / 2, kGrid.n / 2)) == doctest::Approx(1.0));
}
