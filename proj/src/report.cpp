#include "consist/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

namespace consist {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add(std::vector<std::string> row) {
  if (row.size() != header_.size()) throw Error("CSV row width does not match the header");
  rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += csv_field(cells[i]);
    }
    out += "\r\n";
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json vector_json(const Vector& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(number(v(i)));
  return a;
}

namespace {

json sdp_json(const conic::ConicSolution& s) {
  return {{"status", conic::to_string(s.status)},
          {"primal_objective", number(s.primal_objective)},
          {"dual_objective", number(s.dual_objective)},
          {"gap", number(s.gap)},
          {"primal_residual", number(s.primal_residual)},
          {"dual_residual", number(s.dual_residual)},
          {"iterations", s.iterations}};
}

json named_vector(const std::vector<std::string>& names, const Vector& v) {
  json o = json::object();
  for (std::size_t i = 0; i < names.size(); ++i) o[names[i]] = number(v(static_cast<int>(i)));
  return o;
}

std::vector<std::string> qoi_names(const Dataset& d) {
  std::vector<std::string> out;
  for (const auto& q : d.qois) out.push_back(q.name);
  return out;
}

}  // namespace

json scm_json(const Dataset& dataset, const ScmResult& r) {
  json doc;
  doc["dataset"] = dataset.name;
  doc["gamma_lower"] = number(r.gamma_lower);
  doc["gamma_upper"] = number(r.gamma_upper);
  doc["local_feasible"] = r.local_feasible;
  doc["single_basin"] = r.single_basin;
  doc["witness"] = r.local_feasible ? named_vector(dataset.parameter_names, r.x_witness) : json(nullptr);
  doc["relaxation"] = sdp_json(r.sdp.solution);
  doc["product_constraints"] = r.sdp.product_constraints;
  std::string verdict = "undetermined";
  if (r.local_feasible && r.gamma_lower >= 0.0) verdict = "consistent";
  else if (r.sdp.ok() && r.gamma_upper < 0.0) verdict = "inconsistent";
  doc["verdict"] = verdict;
  return doc;
}

json sensitivity_json(const SensitivityReport& rep) {
  json a = json::array();
  for (int i : rep.ranking) {
    const auto& it = rep.items[i];
    a.push_back({{"kind", to_string(it.ref.kind)}, {"name", it.name}, {"sensitivity", number(it.value)}});
  }
  return a;
}

json vcm_json(const Dataset& dataset, const VcmResult& r) {
  json doc;
  doc["dataset"] = dataset.name;
  doc["value_upper"] = number(r.value_upper);
  doc["value_lower"] = number(r.value_lower);
  doc["lower_status"] = conic::to_string(r.sdp_status);
  doc["single_basin"] = r.single_basin;
  doc["witness"] = named_vector(dataset.parameter_names, r.x_witness);
  const auto qn = qoi_names(dataset);
  doc["delta_qoi_lower"] = named_vector(qn, r.delta_L);
  doc["delta_qoi_upper"] = named_vector(qn, r.delta_U);
  doc["delta_param_lower"] = named_vector(dataset.parameter_names, r.delta_l);
  doc["delta_param_upper"] = named_vector(dataset.parameter_names, r.delta_u);
  doc["delta_facet"] = vector_json(r.delta_facet);
  doc["signed_qoi_expansion"] = named_vector(qn, r.signed_qoi_view());
  json relaxed = json::array();
  for (const auto& ref : all_bounds(dataset)) {
    if (!relaxation_nonzero(dataset, r, ref)) continue;
    relaxed.push_back({{"kind", to_string(ref.kind)},
                       {"name", bound_name(dataset, ref)},
                       {"relaxation", number(r.relaxation(ref))},
                       {"coefficient", number(scheme_coefficient(r.scheme, ref))}});
  }
  doc["relaxations"] = relaxed;
  json warnings = json::array();
  if (r.relaxes_parameters(1e-12)) {
    warnings.push_back("parameter bounds were relaxed; surrogate models may need refitting");
  }
  doc["warnings"] = warnings;
  return doc;
}

json trace_json(const IterationTrace& t) {
  json rounds = json::array();
  for (const auto& r : t.rounds) {
    json removed = json::array();
    for (std::size_t k = 0; k < r.removed.size(); ++k) {
      removed.push_back({{"qoi", r.removed[k]}, {"sensitivity", number(r.removed_sensitivity[k])}});
    }
    rounds.push_back({{"qoi_count", r.qois.size()},
                      {"gamma_lower", number(r.gamma_lower)},
                      {"gamma_upper", number(r.gamma_upper)},
                      {"removed", removed}});
  }
  return {{"consistent", t.consistent}, {"removed", t.removed}, {"rounds", rounds}};
}

json tradeoff_json(const Dataset& dataset, const TradeoffScan& s) {
  json pts = json::array();
  for (const auto& p : s.points) {
    json o = {{"r1", number(p.r1)},     {"r2", number(p.r2)},     {"d1", number(p.d1)},
              {"d2", number(p.d2)},     {"eff1", number(p.eff1)}, {"eff2", number(p.eff2)},
              {"rvcm_lower", number(p.rvcm)}, {"feasible", p.feasible}, {"sdp_ok", p.sdp_ok}};
    if (!p.error.empty()) o["error"] = p.error;
    pts.push_back(std::move(o));
  }
  json region = json::array();
  for (const auto& h : s.region) {
    region.push_back({{"r1", number(h.r1)}, {"r2", number(h.r2)}, {"rvcm", number(h.rvcm)}});
  }
  return {{"dataset", dataset.name},
          {"first", {{"kind", to_string(s.first.kind)}, {"name", bound_name(dataset, s.first)}}},
          {"second", {{"kind", to_string(s.second.kind)}, {"name", bound_name(dataset, s.second)}}},
          {"points", pts},
          {"infeasible_region", region},
          {"frontier_monotone", frontier_monotone(s.points)}};
}

json trial_summary_json(const TrialConfig& c, const TrialStats& st) {
  const auto& s = st.summary;
  json cfg = {{"m", c.m},
              {"n", c.n},
              {"n_errors", c.n_errors},
              {"trials", c.trials},
              {"seed", c.seed},
              {"alpha_policy", c.alpha.kind == AlphaPolicy::Kind::fixed ? "fixed" : "threshold_factor"},
              {"alpha_value", number(c.alpha.value)},
              {"slack_range", {number(c.slack_lo), number(c.slack_hi)}},
              {"zero_tol", number(c.zero_tol)}};
  return {{"config", cfg},
          {"completed", s.completed},
          {"skipped", s.skipped},
          {"fraction_perfect", number(s.fraction_perfect)},
          {"median_phi_E", number(s.median_phi_e)},
          {"median_phi_delta", number(s.median_phi_delta)},
          {"mean_phi_E", number(s.mean_phi_e)},
          {"mean_phi_delta", number(s.mean_phi_delta)},
          {"note", "degenerate LP optima resolved by the simplex pivoting order"}};
}

CsvTable sensitivity_csv(const SensitivityReport& rep) {
  CsvTable t({"kind", "name", "sensitivity"});
  for (int i : rep.ranking) {
    const auto& it = rep.items[i];
    t.add({to_string(it.ref.kind), it.name, format_double(it.value)});
  }
  return t;
}

CsvTable relaxation_csv(const Dataset& dataset, const VcmResult& r) {
  CsvTable t({"kind", "name", "relaxation", "coefficient", "effective_expansion", "percent_of_width"});
  for (const auto& ref : all_bounds(dataset)) {
    if (!relaxation_nonzero(dataset, r, ref)) continue;
    const double c = scheme_coefficient(r.scheme, ref);
    const double d = r.relaxation(ref);
    double width = 1.0;
    if (ref.kind == BoundKind::qoi_upper || ref.kind == BoundKind::qoi_lower) {
      width = dataset.qois[ref.index].upper - dataset.qois[ref.index].lower;
    } else if (ref.kind != BoundKind::facet) {
      width = dataset.box.upper(ref.index) - dataset.box.lower(ref.index);
    }
    const std::string pct = std::isfinite(width) ? format_double(100.0 * c * d / width) : "";
    t.add({to_string(ref.kind), bound_name(dataset, ref), format_double(d), format_double(c),
           format_double(c * d), pct});
  }
  return t;
}

CsvTable trials_csv(const TrialStats& st) {
  CsvTable t({"trial", "phi_E", "phi_delta", "alpha", "skipped"});
  for (const auto& r : st.rows) {
    t.add({std::to_string(r.trial), format_double(r.phi_e), format_double(r.phi_delta),
           format_double(r.alpha), r.skipped ? "1" : "0"});
  }
  return t;
}

CsvTable histogram_csv(const Histogram& h) {
  CsvTable t({"bin_lo", "bin_hi", "count"});
  for (std::size_t k = 0; k < h.counts.size(); ++k) {
    t.add({format_double(h.edges[k]), format_double(h.edges[k + 1]), std::to_string(h.counts[k])});
  }
  return t;
}

CsvTable tradeoff_csv(const TradeoffScan& s) {
  CsvTable t({"r1", "r2", "d1", "d2", "eff1", "eff2", "rvcm_lower", "feasible"});
  for (const auto& p : s.points) {
    t.add({format_double(p.r1), format_double(p.r2), format_double(p.d1), format_double(p.d2),
           format_double(p.eff1), format_double(p.eff2), format_double(p.rvcm),
           p.feasible ? "1" : "0"});
  }
  return t;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

std::string dump_json(const json& doc) { return doc.dump(2) + "\n"; }

}  // namespace consist
