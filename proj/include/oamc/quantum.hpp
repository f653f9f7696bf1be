#pragma once

#include <Eigen/Dense>

#include <complex>

namespace oamc {

// Pure state over a (mode x wavelength) product space; index m * N_B + n.
class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(Eigen::VectorXcd entries) : entries_(std::move(entries)) {}

  Eigen::Index dim() const noexcept { return entries_.size(); }
  const Eigen::VectorXcd& entries() const noexcept { return entries_; }
  Eigen::VectorXcd& entries() noexcept { return entries_; }
  double norm() const { return entries_.norm(); }
  StateVector normalized() const { return StateVector(entries_ / entries_.norm()); }

 private:
  Eigen::VectorXcd entries_;
};

// Hermitian matrix in the role of a density operator. Construction does not
// enforce positivity or unit trace; intermediate reconstruction iterates are
// only Hermitian.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  explicit DensityMatrix(Eigen::MatrixXcd m) : m_(std::move(m)) {}

  static DensityMatrix pure(const StateVector& psi) {
    return DensityMatrix(psi.entries() * psi.entries().adjoint());
  }
  static DensityMatrix maximally_mixed(Eigen::Index d) {
    return DensityMatrix(Eigen::MatrixXcd::Identity(d, d) / static_cast<double>(d));
  }

  Eigen::Index dim() const noexcept { return m_.rows(); }
  const Eigen::MatrixXcd& matrix() const noexcept { return m_; }
  Eigen::MatrixXcd& matrix() noexcept { return m_; }

  double trace() const { return m_.trace().real(); }
  double purity() const { return (m_ * m_).trace().real(); }
  double hermiticity_error() const { return (m_ - m_.adjoint()).cwiseAbs().maxCoeff(); }
  Eigen::VectorXd eigenvalues() const;  // ascending

 private:
  Eigen::MatrixXcd m_;
};

// Rectangular M x N matrix; column n holds the output-mode amplitudes of
// input mode n.
struct KrausMatrix {
  Eigen::MatrixXcd matrix;

  Eigen::Index rows() const noexcept { return matrix.rows(); }
  Eigen::Index cols() const noexcept { return matrix.cols(); }
  // max |(K^dagger K - I)_ij|
  double isometry_error() const;
};

inline Eigen::VectorXd DensityMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m_, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

inline double KrausMatrix::isometry_error() const {
  const Eigen::MatrixXcd g = matrix.adjoint() * matrix;
  return (g - Eigen::MatrixXcd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

}  // namespace oamc
