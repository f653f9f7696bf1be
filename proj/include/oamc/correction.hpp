#pragma once

#include "oamc/quantum.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace oamc {

enum class ExtractionMethod { ColumnDivision, DominantEigenvector };

std::string_view to_string(ExtractionMethod m);
ExtractionMethod parse_extraction_method(std::string_view s);

struct ExtractionOptions {
  ExtractionMethod method = ExtractionMethod::ColumnDivision;
  double rank_threshold = 0.1;  // second eigenvalue must stay below this
};

// Recovers |psi> from a near-rank-1 rho. The pivot is the largest diagonal
// entry; the result is normalized with the pivot component real positive.
// Throws RankAmbiguous or ZeroPivot.
StateVector extract_state_vector(const DensityMatrix& rho, const ExtractionOptions& options = {});

struct KrausAssembly {
  KrausMatrix kraus;                 // unit-norm columns
  std::vector<double> column_norms;  // before normalization
};

// Column n = sqrt(N_B) * (entries of psi_out with wavelength index n), then
// normalized. Throws DimensionMismatch or DegenerateColumn.
KrausAssembly assemble_kraus(const StateVector& psi_out, int wavelengths = 3);

// rho_c = (K^dagger (x) I) rho_out (K (x) I) / trace. Throws ZeroTrace.
DensityMatrix correct_state(const DensityMatrix& rho_out, const KrausMatrix& kraus, int wavelengths = 3);

// sqrt(<psi| rho |psi>)
double fidelity(const DensityMatrix& rho, const StateVector& target);
// (1/2) sum |eig(rho - |psi><psi|)|
double trace_distance(const DensityMatrix& rho, const StateVector& target);
// Partial transpose on subsystem B (index a * dim_b + b), then
// (1/2) sum (|lambda| - lambda).
double negativity(const DensityMatrix& rho, int dim_a, int dim_b);
DensityMatrix partial_transpose_b(const DensityMatrix& rho, int dim_a, int dim_b);

struct CorrectionReport {
  double fidelity_corrected = 0.0;
  double fidelity_uncorrected = 0.0;
  double trace_distance_corrected = 0.0;
  double trace_distance_uncorrected = 0.0;
  double negativity_corrected = 0.0;
  double negativity_uncorrected = 0.0;
  ExtractionMethod extraction_method = ExtractionMethod::ColumnDivision;
  double kraus_isometry_error = 0.0;  // ||K^dagger K - I||_max before column normalization
};

CorrectionReport evaluate_states(const DensityMatrix& corrected, const DensityMatrix& uncorrected,
                                 const StateVector& target, int dim_a = 3, int dim_b = 3);

}  // namespace oamc
