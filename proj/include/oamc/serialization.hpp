#pragma once

#include "oamc/channel_sim.hpp"
#include "oamc/correction.hpp"
#include "oamc/quantum.hpp"
#include "oamc/tomography.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace oamc {

// Complex numbers are stored as [re, im]; matrices row-major as nested arrays.
nlohmann::json state_to_json(const StateVector& psi);
StateVector state_from_json(const nlohmann::json& j);
nlohmann::json matrix_to_json(const Eigen::MatrixXcd& m);
Eigen::MatrixXcd matrix_from_json(const nlohmann::json& j);

// {"dim", "captured_power", "modes": [[ell, p], ...], "state", "kraus"}
nlohmann::json choi_to_json(const ChoiResult& choi, const OutputBasisSpec& basis);
ChoiResult choi_from_json(const nlohmann::json& j);

void write_records_csv(std::ostream& out, const std::vector<MeasurementRecord>& records);
std::vector<MeasurementRecord> read_records_csv(std::istream& in);

struct ReconstructionDiagnostics {
  int dim = 0;
  std::size_t records = 0;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  double wall_time_s = 0.0;
};
nlohmann::json diagnostics_to_json(const ReconstructionDiagnostics& d);

// One evaluated realization. status is "ok" or the error kind.
struct ReportRow {
  std::uint64_t seed = 0;
  double w = 0.0;
  int n_out = 0;
  std::int64_t m = 0;
  CorrectionReport report;
  int iterations = 0;
  double residual = 0.0;
  std::string status = "ok";
  std::string message;

  bool ok() const noexcept { return status == "ok"; }
};

// Header: seed,W,N_out,m,F_corr,F_unc,D_corr,D_unc,Neg_corr,Neg_unc,iterations,residual,status
void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows);

struct SummaryEntry {
  std::string metric;
  double mean = 0.0;
  double stderr_ = 0.0;  // NaN when count < 2
  std::size_t count = 0;
  std::map<std::string, double> group_keys;
};

struct SummaryTable {
  std::vector<SummaryEntry> entries;

  const SummaryEntry* find(const std::string& metric, const std::map<std::string, double>& keys = {}) const;
  void append(const SummaryTable& other);
};

// Mean and standard error (sample stdev / sqrt(count)) of each metric over
// rows with status "ok".
SummaryTable summarize(const std::vector<ReportRow>& rows, const std::map<std::string, double>& group_keys);
nlohmann::json summary_to_json(const SummaryTable& table);

struct StructureFunctionRow {
  int n_s = 0;
  double r = 0.0;
  double d_measured = 0.0;
  double d_analytic = 0.0;
  double rel_error = 0.0;
  double stderr_ = 0.0;
};
// Header: n_s,r,D_measured,D_analytic,rel_error,stderr
void write_structure_csv(std::ostream& out, const std::vector<StructureFunctionRow>& rows);

}  // namespace oamc
