#include "doctest.h"

#include "helpers.hpp"
#include "oamc/channel_sim.hpp"
#include "oamc/correction.hpp"
#include "oamc/errors.hpp"

#include <cmath>

using namespace oamc;
using testing_util::random_isometry;
using testing_util::random_state;
using testing_util::random_unitary;

namespace {

// Partial transpose built from Kronecker products of the B-block operators,
// independent of the index shuffle in the library.
Eigen::MatrixXcd kron_partial_transpose(const Eigen::MatrixXcd& rho, int da, int db) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(rho.rows(), rho.cols());
  for (int a = 0; a < da; ++a)
    for (int a2 = 0; a2 < da; ++a2) {
      Eigen::MatrixXcd ea = Eigen::MatrixXcd::Zero(da, da);
      ea(a, a2) = 1.0;
      const Eigen::MatrixXcd block = rho.block(a * db, a2 * db, db, db);
      Eigen::MatrixXcd k(da * db, da * db);
      for (int i = 0; i < da; ++i)
        for (int j = 0; j < da; ++j) k.block(i * db, j * db, db, db) = ea(i, j) * block.transpose();
      out += k;
    }
  return out;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd k(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return k;
}

Eigen::VectorXcd embed_input(const Eigen::MatrixXcd& isometry) {
  // (V (x) I) |Psi> with |Psi> = sum_k |k,k> / sqrt(3)
  const Eigen::Index modes = isometry.rows();
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(modes * 3);
  for (Eigen::Index m = 0; m < modes; ++m)
    for (int k = 0; k < 3; ++k) v[m * 3 + k] = isometry(m, k) / std::sqrt(3.0);
  return v;
}

}  // namespace

TEST_CASE("state extraction") {
  std::mt19937_64 rng(21);
  const auto psi = random_state(20, rng);
  const auto pure = DensityMatrix::pure(StateVector(psi));
  for (auto method : {ExtractionMethod::ColumnDivision, ExtractionMethod::DominantEigenvector}) {
    const auto e = extract_state_vector(pure, {method, 0.1});
    CHECK(std::abs(std::abs(e.entries().dot(psi)) - 1.0) < 1e-10);
    Eigen::Index pivot;
    pure.matrix().diagonal().real().maxCoeff(&pivot);
    CHECK(std::abs(e.entries()[pivot].imag()) < 1e-15);
    CHECK(e.entries()[pivot].real() > 0.0);
  }

  const DensityMatrix mixed(0.98 * pure.matrix() + 0.02 * Eigen::MatrixXcd::Identity(20, 20) / 20.0);
  const auto a = extract_state_vector(mixed, {ExtractionMethod::ColumnDivision, 0.1});
  const auto b = extract_state_vector(mixed, {ExtractionMethod::DominantEigenvector, 0.1});
  CHECK(std::abs(a.entries().dot(psi)) > 0.99);
  CHECK(std::abs(b.entries().dot(psi)) > 0.99);
  CHECK((a.entries() - b.entries()).cwiseAbs().maxCoeff() < 1e-2);

  Eigen::MatrixXcd two = Eigen::MatrixXcd::Zero(4, 4);
  two(0, 0) = two(1, 1) = 0.5;
  CHECK_THROWS_AS(extract_state_vector(DensityMatrix(two)), RankAmbiguous);
  CHECK_THROWS_AS(extract_state_vector(DensityMatrix(Eigen::MatrixXcd::Zero(4, 4))), ZeroPivot);
  CHECK(parse_extraction_method(to_string(ExtractionMethod::DominantEigenvector)) == ExtractionMethod::DominantEigenvector);
  CHECK_THROWS_AS(parse_extraction_method("svd"), std::invalid_argument);
}

TEST_CASE("Kraus assembly") {
  // identity channel embedded in 210 modes
  Eigen::MatrixXcd embed = Eigen::MatrixXcd::Zero(210, 3);
  for (int k = 0; k < 3; ++k) embed(14 + k, k) = 1.0;
  const auto id = assemble_kraus(StateVector(embed_input(embed)));
  CHECK((id.kraus.matrix - embed).cwiseAbs().maxCoeff() < 1e-15);
  for (double n : id.column_norms) CHECK(n == doctest::Approx(1.0));

  std::mt19937_64 rng(31);
  const Eigen::MatrixXcd v = random_isometry(210, 3, rng);
  const cdouble phase = std::polar(1.0, 0.7);
  const auto rec = assemble_kraus(StateVector(phase * embed_input(v)));
  CHECK((rec.kraus.matrix - phase * v).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(rec.kraus.isometry_error() < 1e-12);

  Eigen::VectorXcd degenerate = embed_input(embed);
  for (Eigen::Index m = 0; m < 210; ++m) degenerate[m * 3 + 1] = 0.0;
  CHECK_THROWS_AS(assemble_kraus(StateVector(degenerate)), DegenerateColumn);
  CHECK_THROWS_AS(assemble_kraus(StateVector(Eigen::VectorXcd::Ones(10))), DimensionMismatch);
}

TEST_CASE("channel inversion") {
  const StateVector target = build_input_state(InputStateSpec{});
  Eigen::MatrixXcd embed = Eigen::MatrixXcd::Zero(12, 3);
  for (int k = 0; k < 3; ++k) embed(3 + k, k) = 1.0;
  const auto out = DensityMatrix::pure(StateVector(embed_input(embed)));
  const auto c = correct_state(out, KrausMatrix{embed});
  CHECK(fidelity(c, target) == doctest::Approx(1.0).epsilon(1e-6));

  std::mt19937_64 rng(41);
  const Eigen::MatrixXcd v = random_isometry(210, 3, rng);
  const auto out_v = DensityMatrix::pure(StateVector(embed_input(v)));
  const auto cv = correct_state(out_v, KrausMatrix{v});
  CHECK(std::abs(fidelity(cv, target) - 1.0) < 1e-8);
  CHECK(cv.trace() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cv.hermiticity_error() < 1e-15);

  Eigen::MatrixXcd orth = Eigen::MatrixXcd::Zero(12, 3);
  for (int k = 0; k < 3; ++k) orth(6 + k, k) = 1.0;
  CHECK_THROWS_AS(correct_state(out, KrausMatrix{orth}), ZeroTrace);
  CHECK_THROWS_AS(correct_state(DensityMatrix::maximally_mixed(10), KrausMatrix{embed}), DimensionMismatch);
}

TEST_CASE("fidelity and trace distance values") {
  const StateVector target = build_input_state(InputStateSpec{});
  const auto rho = DensityMatrix::pure(target);
  CHECK(fidelity(rho, target) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(trace_distance(rho, target) < 1e-12);
  Eigen::VectorXcd o = Eigen::VectorXcd::Zero(9);
  o[1] = 1.0;
  CHECK(fidelity(DensityMatrix::pure(StateVector(o)), target) < 1e-15);
  CHECK(trace_distance(DensityMatrix::pure(StateVector(o)), target) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fidelity(DensityMatrix::maximally_mixed(9), target) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK_THROWS_AS(fidelity(DensityMatrix::maximally_mixed(4), target), DimensionMismatch);
  CHECK_THROWS_AS(trace_distance(DensityMatrix::maximally_mixed(4), target), DimensionMismatch);
}

TEST_CASE("negativity") {
  const StateVector target = build_input_state(InputStateSpec{});
  const auto rho = DensityMatrix::pure(target);
  CHECK(std::abs(negativity(rho, 3, 3) - 1.0) < 1e-10);
  // brute-force oracle on the Kronecker-built partial transpose
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(kron_partial_transpose(rho.matrix(), 3, 3));
  double neg = 0.0;
  for (double l : es.eigenvalues()) {
    CHECK((std::abs(std::abs(l) - 1.0 / 3.0) < 1e-12 || std::abs(l) < 1e-12));
    neg += 0.5 * (std::abs(l) - l);
  }
  CHECK(neg == doctest::Approx(1.0).epsilon(1e-12));

  std::mt19937_64 rng(51);
  for (int t = 0; t < 20; ++t) {
    const Eigen::VectorXcd a = random_state(3, rng), b = random_state(4, rng);
    Eigen::VectorXcd prod(12);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 4; ++j) prod[i * 4 + j] = a[i] * b[j];
    CHECK(negativity(DensityMatrix::pure(StateVector(prod)), 3, 4) < 1e-10);

    const Eigen::VectorXcd psi = random_state(12, rng);
    const auto r = DensityMatrix::pure(StateVector(psi));
    const Eigen::MatrixXcd ua = random_unitary(3, rng), ub = random_unitary(4, rng);
    const Eigen::MatrixXcd u = kron(ua, ub);
    const DensityMatrix rotated(u * r.matrix() * u.adjoint());
    CHECK(std::abs(negativity(rotated, 3, 4) - negativity(r, 3, 4)) < 1e-8);
    CHECK((partial_transpose_b(r, 3, 4).matrix() - kron_partial_transpose(r.matrix(), 3, 4)).cwiseAbs().maxCoeff() <
          1e-15);
  }
  CHECK_THROWS_AS(negativity(rho, 2, 3), DimensionMismatch);
}

TEST_CASE("Fuchs-van de Graaf bounds for pure targets") {
  std::mt19937_64 rng(61);
  const StateVector target = build_input_state(InputStateSpec{});
  for (int t = 0; t < 200; ++t) {
    // random mixtures of a few pure states, some close to the target
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(9, 9);
    const int rank = 1 + t % 4;
    for (int k = 0; k < rank; ++k) {
      Eigen::VectorXcd v = random_state(9, rng);
      if (t % 3 == 0) v = (target.entries() + 0.2 * v).normalized();
      m += v * v.adjoint();
    }
    const DensityMatrix rho(m / m.trace().real());
    const double f = fidelity(rho, target), d = trace_distance(rho, target);
    CHECK(1.0 - f <= d + 1e-8);
    CHECK(d <= std::sqrt(1.0 - f * f) + 1e-8);
  }
}

TEST_CASE("evaluation report") {
  const StateVector target = build_input_state(InputStateSpec{});
  const auto r = evaluate_states(DensityMatrix::pure(target), DensityMatrix::maximally_mixed(9), target);
  CHECK(r.fidelity_corrected == doctest::Approx(1.0));
  CHECK(r.fidelity_uncorrected == doctest::Approx(1.0 / 3.0));
  CHECK(r.negativity_corrected == doctest::Approx(1.0));
  CHECK(r.negativity_uncorrected == doctest::Approx(0.0));
  CHECK(r.trace_distance_uncorrected == doctest::Approx(8.0 / 9.0));
}
