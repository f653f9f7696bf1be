#pragma once

#include "oamc/errors.hpp"
#include "oamc/quantum.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace oamc {

// Generalized Gell-Mann basis scaled trace-orthonormal, tr(t_i t_j) = delta_ij.
//
// Ordering for dimension d, with P = d(d-1)/2 pairs (j < k) in row-major order:
//   0                identity / sqrt(d)
//   1 .. P           symmetric   (E_jk + E_kj) / sqrt(2)
//   P+1 .. 2P        antisymmetric -i (E_jk - E_kj) / sqrt(2)
//   2P+1 .. d^2-1    diagonal l = 1..d-1: (sum_{j<l} E_jj - l E_ll) / sqrt(l (l+1))
//
// Elements are never materialized unless asked for; expectation values and
// updates touch only the nonzero entries.
class GGMBasis {
 public:
  enum class Kind { Identity, Symmetric, Antisymmetric, Diagonal };
  struct Element {
    Kind kind;
    int j;  // row (Symmetric/Antisymmetric) or l (Diagonal)
    int k;
  };

  explicit GGMBasis(int d);

  int dim() const noexcept { return d_; }
  std::int64_t size() const noexcept { return static_cast<std::int64_t>(d_) * d_; }
  Element element(std::int64_t i) const;
  Eigen::MatrixXcd dense(std::int64_t i) const;

  // tr(t_i rho) for Hermitian rho
  double expectation(const Eigen::MatrixXcd& rho, std::int64_t i) const;
  // <psi| t_i |psi>
  double expectation(const Eigen::VectorXcd& psi, std::int64_t i) const;
  // rho += coeff * t_i
  void add_scaled(Eigen::MatrixXcd& rho, std::int64_t i, double coeff) const;

  // All d^2 coefficients tr(t_i rho), and the inverse expansion.
  Eigen::VectorXd coefficients(const Eigen::MatrixXcd& rho) const;
  Eigen::MatrixXcd expand(const Eigen::VectorXd& coeffs) const;

 private:
  int d_;
  std::int64_t pairs_;
  std::vector<std::pair<int, int>> pair_table_;
};

inline GGMBasis ggm_basis(int d) { return GGMBasis(d); }

struct MeasurementRecord {
  std::int64_t index = 0;
  double alpha = 0.0;
};

// m distinct indices, identity (0) first, the rest uniform without
// replacement in random order. Throws InvalidCount unless 1 <= m <= d^2.
std::vector<std::int64_t> sample_measurement_set(int d, std::int64_t m, std::mt19937_64& rng);

// Exact expectations, plus N(0, noise_sigma^2) noise when noise_sigma > 0.
std::vector<MeasurementRecord> measure_state(const StateVector& state, const GGMBasis& basis,
                                             std::span<const std::int64_t> indices,
                                             double noise_sigma = 0.0, std::mt19937_64* rng = nullptr);

enum class ThresholdMode {
  Soft,  // keep eigenvalues > eps0, shifted down by eps0
  Hard,  // keep eigenvalues > eps0 unchanged
};

struct ReconstructionConfig {
  double epsilon0 = 0.02;
  double tol = 1e-6;
  int max_iter = 5000;
  ThresholdMode mode = ThresholdMode::Soft;
  std::optional<Eigen::MatrixXcd> guess;  // default: maximally mixed

  void validate() const;
};

// Hermitize, eigendecompose, drop eigenvalues <= eps0, rebuild and divide by
// the trace. Throws AllBelowThreshold when nothing survives.
DensityMatrix threshold_step(const DensityMatrix& rho, double epsilon0,
                             ThresholdMode mode = ThresholdMode::Soft);

// One sequential pass of hyperplane projections in record order:
// rho += (alpha_i - tr(t_i rho)) t_i.
DensityMatrix project_measurements(const DensityMatrix& rho, std::span<const MeasurementRecord> records,
                                   const GGMBasis& basis);

// ||M rho - alpha||_2 over the records.
double measurement_residual(const DensityMatrix& rho, std::span<const MeasurementRecord> records,
                            const GGMBasis& basis);

struct ReconstructionResult {
  DensityMatrix rho;           // Hermitian, PSD, unit trace
  int iterations = 0;
  double residual = 0.0;       // of rho against the records
  bool converged = false;
  std::vector<double> residual_history;  // post-threshold residual per iteration
};

class NotConverged : public Error {
 public:
  explicit NotConverged(ReconstructionResult result)
      : Error("reconstruction did not converge in " + std::to_string(result.iterations) +
              " iterations (residual " + std::to_string(result.residual) + ")"),
        result_(std::move(result)) {}
  const char* kind() const noexcept override { return "NotConverged"; }
  const ReconstructionResult& result() const noexcept { return result_; }
  double residual() const noexcept { return result_.residual; }

 private:
  ReconstructionResult result_;
};

// Alternates threshold_step and project_measurements from the guess (which
// is projected once first) until consecutive iterates differ by less than
// tol in Frobenius norm, then applies a final threshold_step.
// Throws NotConverged after max_iter.
ReconstructionResult reconstruct(std::span<const MeasurementRecord> records, const GGMBasis& basis,
                                 const ReconstructionConfig& config = {});

}  // namespace oamc
