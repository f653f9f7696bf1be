#include "oamc/tomography.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace oamc {

namespace {
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
const double kSqrt2 = std::sqrt(2.0);

double diagonal_norm(int l) { return 1.0 / std::sqrt(static_cast<double>(l) * (l + 1)); }
}  // namespace

GGMBasis::GGMBasis(int d) : d_(d), pairs_(static_cast<std::int64_t>(d) * (d - 1) / 2) {
  if (d < 2) throw std::invalid_argument("GGM basis needs d >= 2");
  pair_table_.reserve(static_cast<std::size_t>(pairs_));
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k) pair_table_.emplace_back(j, k);
}

GGMBasis::Element GGMBasis::element(std::int64_t i) const {
  if (i < 0 || i >= size()) throw std::out_of_range("GGM index out of range");
  if (i == 0) return {Kind::Identity, 0, 0};
  if (i <= pairs_) {
    const auto [j, k] = pair_table_[static_cast<std::size_t>(i - 1)];
    return {Kind::Symmetric, j, k};
  }
  if (i <= 2 * pairs_) {
    const auto [j, k] = pair_table_[static_cast<std::size_t>(i - 1 - pairs_)];
    return {Kind::Antisymmetric, j, k};
  }
  return {Kind::Diagonal, static_cast<int>(i - 2 * pairs_), 0};
}

Eigen::MatrixXcd GGMBasis::dense(std::int64_t i) const {
  Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(d_, d_);
  add_scaled(t, i, 1.0);
  return t;
}

double GGMBasis::expectation(const Eigen::MatrixXcd& rho, std::int64_t i) const {
  const auto e = element(i);
  switch (e.kind) {
    case Kind::Identity:
      return rho.trace().real() / std::sqrt(static_cast<double>(d_));
    case Kind::Symmetric:
      return kSqrt2 * rho(e.j, e.k).real();
    case Kind::Antisymmetric:
      return -kSqrt2 * rho(e.j, e.k).imag();
    case Kind::Diagonal: {
      const int l = e.j;
      double s = 0.0;
      for (int j = 0; j < l; ++j) s += rho(j, j).real();
      return (s - l * rho(l, l).real()) * diagonal_norm(l);
    }
  }
  return 0.0;
}

double GGMBasis::expectation(const Eigen::VectorXcd& psi, std::int64_t i) const {
  const auto e = element(i);
  switch (e.kind) {
    case Kind::Identity:
      return psi.squaredNorm() / std::sqrt(static_cast<double>(d_));
    case Kind::Symmetric:
      return kSqrt2 * (std::conj(psi[e.j]) * psi[e.k]).real();
    case Kind::Antisymmetric:
      return kSqrt2 * (std::conj(psi[e.j]) * psi[e.k]).imag();
    case Kind::Diagonal: {
      const int l = e.j;
      double s = 0.0;
      for (int j = 0; j < l; ++j) s += std::norm(psi[j]);
      return (s - l * std::norm(psi[l])) * diagonal_norm(l);
    }
  }
  return 0.0;
}

void GGMBasis::add_scaled(Eigen::MatrixXcd& rho, std::int64_t i, double coeff) const {
  const auto e = element(i);
  switch (e.kind) {
    case Kind::Identity: {
      const double v = coeff / std::sqrt(static_cast<double>(d_));
      for (int j = 0; j < d_; ++j) rho(j, j) += v;
      break;
    }
    case Kind::Symmetric:
      rho(e.j, e.k) += coeff * kInvSqrt2;
      rho(e.k, e.j) += coeff * kInvSqrt2;
      break;
    case Kind::Antisymmetric:
      rho(e.j, e.k) += std::complex<double>(0.0, -coeff * kInvSqrt2);
      rho(e.k, e.j) += std::complex<double>(0.0, coeff * kInvSqrt2);
      break;
    case Kind::Diagonal: {
      const int l = e.j;
      const double v = coeff * diagonal_norm(l);
      for (int j = 0; j < l; ++j) rho(j, j) += v;
      rho(l, l) -= l * v;
      break;
    }
  }
}

Eigen::VectorXd GGMBasis::coefficients(const Eigen::MatrixXcd& rho) const {
  Eigen::VectorXd c(size());
  c[0] = rho.trace().real() / std::sqrt(static_cast<double>(d_));
  for (std::int64_t p = 0; p < pairs_; ++p) {
    const auto [j, k] = pair_table_[static_cast<std::size_t>(p)];
    c[1 + p] = kSqrt2 * rho(j, k).real();
    c[1 + pairs_ + p] = -kSqrt2 * rho(j, k).imag();
  }
  double prefix = 0.0;
  for (int l = 1; l < d_; ++l) {
    prefix += rho(l - 1, l - 1).real();
    c[2 * pairs_ + l] = (prefix - l * rho(l, l).real()) * diagonal_norm(l);
  }
  return c;
}

Eigen::MatrixXcd GGMBasis::expand(const Eigen::VectorXd& coeffs) const {
  if (coeffs.size() != size()) throw DimensionMismatch("coefficient vector length must be d^2");
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d_, d_);
  for (std::int64_t i = 0; i < size(); ++i)
    if (coeffs[i] != 0.0) add_scaled(rho, i, coeffs[i]);
  return rho;
}

std::vector<std::int64_t> sample_measurement_set(int d, std::int64_t m, std::mt19937_64& rng) {
  const std::int64_t total = static_cast<std::int64_t>(d) * d;
  if (d < 2) throw InvalidCount("dimension must be >= 2");
  if (m < 1 || m > total) throw InvalidCount("measurement count must lie in [1, d^2]");
  std::vector<std::int64_t> pool(static_cast<std::size_t>(total - 1));
  std::iota(pool.begin(), pool.end(), std::int64_t{1});
  // partial Fisher-Yates over the non-identity indices
  for (std::int64_t k = 0; k < m - 1; ++k) {
    std::uniform_int_distribution<std::int64_t> pick(k, total - 2);
    std::swap(pool[static_cast<std::size_t>(k)], pool[static_cast<std::size_t>(pick(rng))]);
  }
  std::vector<std::int64_t> out{0};
  out.insert(out.end(), pool.begin(), pool.begin() + (m - 1));
  return out;
}

std::vector<MeasurementRecord> measure_state(const StateVector& state, const GGMBasis& basis,
                                             std::span<const std::int64_t> indices, double noise_sigma,
                                             std::mt19937_64* rng) {
  if (state.dim() != basis.dim()) throw DimensionMismatch("state and basis dimensions differ");
  if (noise_sigma > 0.0 && rng == nullptr) throw std::invalid_argument("noise requires a random source");
  std::normal_distribution<double> noise(0.0, noise_sigma > 0.0 ? noise_sigma : 1.0);
  std::vector<MeasurementRecord> out;
  out.reserve(indices.size());
  for (auto i : indices) {
    double alpha = basis.expectation(state.entries(), i);
    if (noise_sigma > 0.0) alpha += noise(*rng);
    out.push_back({i, alpha});
  }
  return out;
}

void ReconstructionConfig::validate() const {
  if (!(epsilon0 > 0.0 && epsilon0 < 1.0)) throw std::invalid_argument("epsilon0 must lie in (0, 1)");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
}

DensityMatrix threshold_step(const DensityMatrix& rho, double epsilon0, ThresholdMode mode) {
  const Eigen::MatrixXcd h = 0.5 * (rho.matrix() + rho.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  const auto& w = es.eigenvalues();
  const auto& v = es.eigenvectors();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < w.size(); ++k)
    if (w[k] > epsilon0) keep.push_back(k);
  if (keep.empty()) throw AllBelowThreshold("no eigenvalue exceeds epsilon0");
  Eigen::MatrixXcd vk(h.rows(), static_cast<Eigen::Index>(keep.size()));
  Eigen::VectorXd wk(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    vk.col(static_cast<Eigen::Index>(c)) = v.col(keep[c]);
    wk[static_cast<Eigen::Index>(c)] = mode == ThresholdMode::Soft ? w[keep[c]] - epsilon0 : w[keep[c]];
  }
  Eigen::MatrixXcd out = vk * wk.asDiagonal() * vk.adjoint();
  out = 0.5 * (out + out.adjoint()).eval();
  return DensityMatrix(out / out.trace().real());
}

DensityMatrix project_measurements(const DensityMatrix& rho, std::span<const MeasurementRecord> records,
                                   const GGMBasis& basis) {
  if (rho.dim() != basis.dim()) throw DimensionMismatch("density matrix and basis dimensions differ");
  Eigen::MatrixXcd m = rho.matrix();
  for (const auto& r : records) basis.add_scaled(m, r.index, r.alpha - basis.expectation(m, r.index));
  return DensityMatrix(std::move(m));
}

double measurement_residual(const DensityMatrix& rho, std::span<const MeasurementRecord> records,
                            const GGMBasis& basis) {
  double s = 0.0;
  for (const auto& r : records) {
    const double d = basis.expectation(rho.matrix(), r.index) - r.alpha;
    s += d * d;
  }
  return std::sqrt(s);
}

ReconstructionResult reconstruct(std::span<const MeasurementRecord> records, const GGMBasis& basis,
                                 const ReconstructionConfig& config) {
  config.validate();
  if (records.empty()) throw InvalidCount("reconstruction needs at least one record");
  const int d = basis.dim();
  DensityMatrix rho = config.guess ? DensityMatrix(*config.guess) : DensityMatrix::maximally_mixed(d);
  if (rho.dim() != d) throw DimensionMismatch("guess matrix dimension differs from basis");

  ReconstructionResult result;
  rho = project_measurements(rho, records, basis);
  for (int it = 1; it <= config.max_iter; ++it) {
    const DensityMatrix thresholded = threshold_step(rho, config.epsilon0, config.mode);
    result.residual_history.push_back(measurement_residual(thresholded, records, basis));
    DensityMatrix next = project_measurements(thresholded, records, basis);
    const double change = (next.matrix() - rho.matrix()).norm();
    rho = std::move(next);
    result.iterations = it;
    if (change < config.tol) {
      result.converged = true;
      break;
    }
  }
  result.rho = threshold_step(rho, config.epsilon0, config.mode);
  result.residual = measurement_residual(result.rho, records, basis);
  if (!result.converged) throw NotConverged(std::move(result));
  return result;
}

}  // namespace oamc
