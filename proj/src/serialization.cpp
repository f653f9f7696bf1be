#include "oamc/serialization.hpp"

#include "oamc/errors.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

namespace oamc {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

json complex_json(std::complex<double> c) { return json::array({c.real(), c.imag()}); }

std::complex<double> complex_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw FormatError("complex value must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

json state_to_json(const StateVector& psi) {
  json a = json::array();
  for (Eigen::Index i = 0; i < psi.dim(); ++i) a.push_back(complex_json(psi.entries()[i]));
  return a;
}

StateVector state_from_json(const json& j) {
  if (!j.is_array()) throw FormatError("state must be an array");
  Eigen::VectorXcd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = complex_from(j[i]);
  return StateVector(std::move(v));
}

json matrix_to_json(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXcd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw FormatError("matrix must be a nested array");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) throw FormatError("ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = complex_from(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

json choi_to_json(const ChoiResult& choi, const OutputBasisSpec& basis) {
  json modes = json::array();
  for (const auto& m : basis.modes) modes.push_back({m.ell, m.p});
  return json{{"dim", choi.state.dim()},
              {"captured_power", choi.captured_power},
              {"modes", modes},
              {"state", state_to_json(choi.state)},
              {"kraus", matrix_to_json(choi.ground_truth.matrix)}};
}

ChoiResult choi_from_json(const json& j) {
  try {
    ChoiResult c;
    c.state = state_from_json(j.at("state"));
    c.ground_truth.matrix = matrix_from_json(j.at("kraus"));
    c.captured_power = j.value("captured_power", 1.0);
    if (j.contains("dim") && j.at("dim").get<Eigen::Index>() != c.state.dim())
      throw FormatError("dim does not match state length");
    return c;
  } catch (const json::exception& e) {
    throw FormatError(std::string("choi json: ") + e.what());
  }
}

void write_records_csv(std::ostream& out, const std::vector<MeasurementRecord>& records) {
  out << "index,alpha\n";
  for (const auto& r : records) out << r.index << ',' << fmt(r.alpha) << '\n';
}

std::vector<MeasurementRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("records csv is empty");
  if (line.rfind("index,alpha", 0) != 0) throw FormatError("records csv must start with header index,alpha");
  std::vector<MeasurementRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw FormatError("records csv line " + std::to_string(lineno) + " lacks a comma");
    MeasurementRecord r;
    try {
      std::size_t used = 0;
      r.index = std::stoll(line.substr(0, comma), &used);
      r.alpha = std::stod(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw FormatError("records csv line " + std::to_string(lineno) + " is malformed");
    }
    out.push_back(r);
  }
  return out;
}

json diagnostics_to_json(const ReconstructionDiagnostics& d) {
  return json{{"dim", d.dim},           {"records", d.records},     {"iterations", d.iterations},
              {"residual", d.residual}, {"converged", d.converged}, {"wall_time_s", d.wall_time_s}};
}

void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << "seed,W,N_out,m,F_corr,F_unc,D_corr,D_unc,Neg_corr,Neg_unc,iterations,residual,status\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : rows) {
    const auto& c = r.report;
    const auto v = [&](double x) { return fmt(r.ok() ? x : nan); };
    out << r.seed << ',' << fmt(r.w) << ',' << r.n_out << ',' << r.m << ',' << v(c.fidelity_corrected) << ','
        << v(c.fidelity_uncorrected) << ',' << v(c.trace_distance_corrected) << ','
        << v(c.trace_distance_uncorrected) << ',' << v(c.negativity_corrected) << ','
        << v(c.negativity_uncorrected) << ',' << r.iterations << ',' << fmt(r.residual) << ',' << r.status
        << '\n';
  }
}

const SummaryEntry* SummaryTable::find(const std::string& metric, const std::map<std::string, double>& keys) const {
  for (const auto& e : entries) {
    if (e.metric != metric) continue;
    bool match = true;
    for (const auto& [k, v] : keys) {
      const auto it = e.group_keys.find(k);
      if (it == e.group_keys.end() || it->second != v) match = false;
    }
    if (match) return &e;
  }
  return nullptr;
}

void SummaryTable::append(const SummaryTable& other) {
  entries.insert(entries.end(), other.entries.begin(), other.entries.end());
}

SummaryTable summarize(const std::vector<ReportRow>& rows, const std::map<std::string, double>& group_keys) {
  struct Metric {
    const char* name;
    double (*get)(const ReportRow&);
  };
  static const Metric metrics[] = {
      {"F_corr", [](const ReportRow& r) { return r.report.fidelity_corrected; }},
      {"F_unc", [](const ReportRow& r) { return r.report.fidelity_uncorrected; }},
      {"D_corr", [](const ReportRow& r) { return r.report.trace_distance_corrected; }},
      {"D_unc", [](const ReportRow& r) { return r.report.trace_distance_uncorrected; }},
      {"Neg_corr", [](const ReportRow& r) { return r.report.negativity_corrected; }},
      {"Neg_unc", [](const ReportRow& r) { return r.report.negativity_uncorrected; }},
  };
  SummaryTable table;
  for (const auto& m : metrics) {
    SummaryEntry e;
    e.metric = m.name;
    e.group_keys = group_keys;
    double sum = 0.0;
    for (const auto& r : rows)
      if (r.ok()) {
        sum += m.get(r);
        ++e.count;
      }
    e.mean = e.count ? sum / static_cast<double>(e.count) : std::numeric_limits<double>::quiet_NaN();
    if (e.count >= 2) {
      double ss = 0.0;
      for (const auto& r : rows)
        if (r.ok()) ss += (m.get(r) - e.mean) * (m.get(r) - e.mean);
      e.stderr_ = std::sqrt(ss / static_cast<double>(e.count - 1)) / std::sqrt(static_cast<double>(e.count));
    } else {
      e.stderr_ = std::numeric_limits<double>::quiet_NaN();
    }
    table.entries.push_back(std::move(e));
  }
  return table;
}

json summary_to_json(const SummaryTable& table) {
  const auto num = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
  json a = json::array();
  for (const auto& e : table.entries)
    a.push_back(json{{"metric", e.metric},
                     {"mean", num(e.mean)},
                     {"stderr", num(e.stderr_)},
                     {"count", e.count},
                     {"group_keys", e.group_keys}});
  return a;
}

void write_structure_csv(std::ostream& out, const std::vector<StructureFunctionRow>& rows) {
  out << "n_s,r,D_measured,D_analytic,rel_error,stderr\n";
  for (const auto& r : rows)
    out << r.n_s << ',' << fmt(r.r) << ',' << fmt(r.d_measured) << ',' << fmt(r.d_analytic) << ','
        << fmt(r.rel_error) << ',' << fmt(r.stderr_) << '\n';
}

}  // namespace oamc
