#pragma once

#include "oamc/quantum.hpp"

#include <random>

namespace testing_util {

inline Eigen::VectorXcd random_state(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::VectorXcd v(d);
  for (int i = 0; i < d; ++i) v[i] = {n(rng), n(rng)};
  return v / v.norm();
}

inline Eigen::MatrixXcd random_hermitian(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXcd a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = {n(rng), n(rng)};
  return 0.5 * (a + a.adjoint());
}

// Haar-ish random isometry from a QR factorization.
inline Eigen::MatrixXcd random_isometry(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXcd a(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) a(i, j) = {n(rng), n(rng)};
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
  return qr.householderQ() * Eigen::MatrixXcd::Identity(rows, cols);
}

inline Eigen::MatrixXcd random_unitary(int d, std::mt19937_64& rng) { return random_isometry(d, d, rng); }

}  // namespace testing_util
