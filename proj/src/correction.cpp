#include "oamc/correction.hpp"

#include "oamc/errors.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace oamc {

std::string_view to_string(ExtractionMethod m) {
  return m == ExtractionMethod::ColumnDivision ? "column-division" : "dominant-eigenvector";
}

ExtractionMethod parse_extraction_method(std::string_view s) {
  if (s == "column-division") return ExtractionMethod::ColumnDivision;
  if (s == "dominant-eigenvector") return ExtractionMethod::DominantEigenvector;
  throw std::invalid_argument("unknown extraction method: " + std::string(s));
}

StateVector extract_state_vector(const DensityMatrix& rho, const ExtractionOptions& options) {
  const Eigen::MatrixXcd& m = rho.matrix();
  const Eigen::Index d = m.rows();
  Eigen::Index pivot = 0;
  m.diagonal().real().maxCoeff(&pivot);
  const double pivot_value = m(pivot, pivot).real();
  if (pivot_value < 1e-10) throw ZeroPivot("largest diagonal entry is below 1e-10");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m + m.adjoint()));
  const auto& w = es.eigenvalues();
  if (d > 1 && w[d - 2] >= options.rank_threshold)
    throw RankAmbiguous("second eigenvalue " + std::to_string(w[d - 2]) + " exceeds rank threshold");

  Eigen::VectorXcd psi;
  if (options.method == ExtractionMethod::ColumnDivision) {
    psi = m.col(pivot) / std::sqrt(pivot_value);
  } else {
    psi = es.eigenvectors().col(d - 1);
  }
  psi /= psi.norm();
  const std::complex<double> p = psi[pivot];
  if (std::abs(p) > 0.0) psi *= std::conj(p) / std::abs(p);
  return StateVector(std::move(psi));
}

KrausAssembly assemble_kraus(const StateVector& psi_out, int wavelengths) {
  if (wavelengths < 1 || psi_out.dim() % wavelengths != 0)
    throw DimensionMismatch("state dimension is not a multiple of the wavelength count");
  const Eigen::Index modes = psi_out.dim() / wavelengths;
  KrausAssembly out;
  out.kraus.matrix.resize(modes, wavelengths);
  const double scale = std::sqrt(static_cast<double>(wavelengths));
  for (int n = 0; n < wavelengths; ++n) {
    for (Eigen::Index m = 0; m < modes; ++m)
      out.kraus.matrix(m, n) = scale * psi_out.entries()[m * wavelengths + n];
    const double norm = out.kraus.matrix.col(n).norm();
    out.column_norms.push_back(norm);
    if (norm < 1e-6) throw DegenerateColumn("Kraus column " + std::to_string(n) + " vanishes");
    out.kraus.matrix.col(n) /= norm;
  }
  return out;
}

DensityMatrix correct_state(const DensityMatrix& rho_out, const KrausMatrix& kraus, int wavelengths) {
  const Eigen::Index modes = kraus.rows();
  const Eigen::Index inputs = kraus.cols();
  if (rho_out.dim() != modes * wavelengths)
    throw DimensionMismatch("output state does not match Kraus rows times wavelengths");
  // L = K (x) I: L(m*W + k, n*W + k) = K(m, n)
  Eigen::MatrixXcd lift = Eigen::MatrixXcd::Zero(modes * wavelengths, inputs * wavelengths);
  for (Eigen::Index m = 0; m < modes; ++m)
    for (Eigen::Index n = 0; n < inputs; ++n)
      for (int k = 0; k < wavelengths; ++k) lift(m * wavelengths + k, n * wavelengths + k) = kraus.matrix(m, n);
  Eigen::MatrixXcd c = lift.adjoint() * rho_out.matrix() * lift;
  c = 0.5 * (c + c.adjoint()).eval();
  const double tr = c.trace().real();
  if (tr < 1e-12) throw ZeroTrace("corrected state has vanishing trace");
  return DensityMatrix(c / tr);
}

double fidelity(const DensityMatrix& rho, const StateVector& target) {
  if (rho.dim() != target.dim()) throw DimensionMismatch("fidelity: dimensions differ");
  const double overlap = target.entries().dot(rho.matrix() * target.entries()).real();
  return std::sqrt(std::max(overlap, 0.0));
}

double trace_distance(const DensityMatrix& rho, const StateVector& target) {
  if (rho.dim() != target.dim()) throw DimensionMismatch("trace_distance: dimensions differ");
  const Eigen::MatrixXcd diff = rho.matrix() - target.entries() * target.entries().adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (diff + diff.adjoint()), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

DensityMatrix partial_transpose_b(const DensityMatrix& rho, int dim_a, int dim_b) {
  if (rho.dim() != static_cast<Eigen::Index>(dim_a) * dim_b)
    throw DimensionMismatch("negativity: dim_a * dim_b must equal the matrix dimension");
  const Eigen::MatrixXcd& m = rho.matrix();
  Eigen::MatrixXcd pt(m.rows(), m.cols());
  for (int a = 0; a < dim_a; ++a)
    for (int b = 0; b < dim_b; ++b)
      for (int a2 = 0; a2 < dim_a; ++a2)
        for (int b2 = 0; b2 < dim_b; ++b2)
          pt(a * dim_b + b, a2 * dim_b + b2) = m(a * dim_b + b2, a2 * dim_b + b);
  return DensityMatrix(std::move(pt));
}

double negativity(const DensityMatrix& rho, int dim_a, int dim_b) {
  const auto pt = partial_transpose_b(rho, dim_a, dim_b);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(pt.matrix(), Eigen::EigenvaluesOnly);
  double sum = 0.0;
  for (double l : es.eigenvalues()) sum += std::abs(l) - l;
  return 0.5 * sum;
}

CorrectionReport evaluate_states(const DensityMatrix& corrected, const DensityMatrix& uncorrected,
                                 const StateVector& target, int dim_a, int dim_b) {
  CorrectionReport r;
  r.fidelity_corrected = fidelity(corrected, target);
  r.fidelity_uncorrected = fidelity(uncorrected, target);
  r.trace_distance_corrected = trace_distance(corrected, target);
  r.trace_distance_uncorrected = trace_distance(uncorrected, target);
  r.negativity_corrected = negativity(corrected, dim_a, dim_b);
  r.negativity_uncorrected = negativity(uncorrected, dim_a, dim_b);
  return r;
}

}  // namespace oamc
