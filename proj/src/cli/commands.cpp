#include "consist/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "consist/report.hpp"

namespace consist::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunConfig {
  std::string dataset;
  std::string scheme = "unit";
  std::string overrides;
  std::uint64_t seed = 0;
  std::string out = ".";
  int starts = 30;
  double tol = 1e-8;
};

class InputError : public Error {
 public:
  using Error::Error;
};

void add_common(CLI::App* cmd, RunConfig& cfg, bool needs_dataset = true) {
  auto* d = cmd->add_option("--dataset", cfg.dataset, "dataset JSON file");
  if (needs_dataset) d->required();
  cmd->add_option("--seed", cfg.seed, "random seed");
  cmd->add_option("--out", cfg.out, "output directory");
  cmd->add_option("--starts", cfg.starts, "local search starts")->check(CLI::PositiveNumber);
  cmd->add_option("--tol", cfg.tol, "relaxation solver tolerance")->check(CLI::PositiveNumber);
}

void add_scheme(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--scheme", cfg.scheme,
                  "coefficient kind for all bounds, or qoi_kind:param_kind (unit|interval|bound|null)");
  cmd->add_option("--overrides", cfg.overrides, "JSON object mapping kind:name to a coefficient");
}

Dataset load(const RunConfig& cfg, std::ostream& err) {
  if (!fs::is_regular_file(cfg.dataset)) throw InputError("cannot open dataset file '" + cfg.dataset + "'");
  std::vector<std::string> warnings;
  Dataset d = load_dataset(cfg.dataset, &warnings);
  for (const auto& w : warnings) err << "warning: " << w << "\n";
  return d;
}

RelaxationScheme scheme_from(const Dataset& d, const RunConfig& cfg) {
  const auto colon = cfg.scheme.find(':');
  const std::string qk = colon == std::string::npos ? cfg.scheme : cfg.scheme.substr(0, colon);
  const std::string pk = colon == std::string::npos ? cfg.scheme : cfg.scheme.substr(colon + 1);
  RelaxationScheme s;
  try {
    s = build_scheme(d, parse_scheme_kind(qk), parse_scheme_kind(pk));
  } catch (const Error& e) {
    throw InputError(std::string("--scheme: ") + e.what());
  }
  if (cfg.overrides.empty()) return s;
  std::ifstream in(cfg.overrides);
  if (!in) throw InputError("cannot read overrides file '" + cfg.overrides + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw InputError("overrides file: " + std::string(e.what()));
  }
  if (!doc.is_object()) throw InputError("overrides file must hold a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (!value.is_number() || value.get<double>() < 0.0 || !std::isfinite(value.get<double>())) {
      throw InputError("override '" + key + "' must be a nonnegative number");
    }
    BoundRef ref;
    try {
      ref = parse_bound_ref(d, key);
    } catch (const Error& e) {
      throw InputError("override '" + key + "': " + e.what());
    }
    set_scheme_coefficient(s, ref, value.get<double>());
  }
  try {
    check_scheme(d, s);
  } catch (const Error& e) {
    throw InputError(e.what());
  }
  return s;
}

LocalOptions local_options(const RunConfig& cfg) {
  LocalOptions o;
  o.starts = cfg.starts;
  o.seed = cfg.seed;
  return o;
}

SdpOptions sdp_options(const RunConfig& cfg) {
  SdpOptions o;
  o.seed = cfg.seed;
  o.solver.feas_tol = cfg.tol;
  o.solver.gap_tol = cfg.tol;
  return o;
}

fs::path out_dir(const RunConfig& cfg) {
  fs::path p(cfg.out);
  fs::create_directories(p);
  return p;
}

bool solver_broke(conic::SolveStatus s) {
  return s == conic::SolveStatus::numerical_failure || s == conic::SolveStatus::max_iter;
}

int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Dataset d = load(cfg, err);
  const ValidationReport rep = validate_dataset(d);
  if (!rep.ok()) {
    err << rep.summary() << "\n";
    return kInputError;
  }
  out << "ok: " << d.n() << " parameters, " << d.N() << " QOIs, " << d.m() << " facets\n";
  return kConsistent;
}

int cmd_scalar(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Dataset d = load(cfg, err);
  ScmOptions opt{local_options(cfg), sdp_options(cfg)};
  const ScmResult r = scm(d, opt);
  const fs::path dir = out_dir(cfg);
  json doc = scm_json(d, r);
  SensitivityReport sens;
  if (r.sdp.ok()) {
    sens = sensitivities(d, r.sdp);
    doc["sensitivities"] = sensitivity_json(sens);
  }
  write_file(dir / "scm.json", dump_json(doc));
  write_file(dir / "sensitivities.csv", sensitivity_csv(sens).str());
  out << "rSCM interval [" << format_double(r.gamma_lower) << ", " << format_double(r.gamma_upper)
      << "] (" << doc["verdict"].get<std::string>() << ")\n";
  if (r.local_feasible && r.gamma_lower >= 0.0) return kConsistent;
  if (r.sdp.ok() && r.gamma_upper < 0.0) return kInconsistent;
  if (solver_broke(r.sdp.solution.status)) {
    err << "relaxation solver: " << conic::to_string(r.sdp.solution.status) << "\n";
    return kSolverFailure;
  }
  return kUndetermined;
}

int cmd_vector(const RunConfig& cfg, const std::string& apply, int support, std::ostream& out,
               std::ostream& err) {
  const Dataset d = load(cfg, err);
  const RelaxationScheme s = scheme_from(d, cfg);
  VcmOptions opt{local_options(cfg), sdp_options(cfg)};
  const VcmResult r = vcm(d, s, opt);
  const fs::path dir = out_dir(cfg);
  json doc = vcm_json(d, r);
  json structure = json::array();
  for (const auto& f : check_structure(d, r)) {
    structure.push_back({{"code", f.code}, {"message", f.message}});
  }
  doc["structure_findings"] = structure;
  if (support >= 0) {
    const ExactSupport es = vcm_exact_support(d, s, support, opt);
    json sup = json::array();
    for (const auto& set : es.supports) {
      json names = json::array();
      for (const auto& ref : set) names.push_back(to_string(ref.kind) + ":" + bound_name(d, ref));
      sup.push_back(names);
    }
    doc["exact_support"] = {{"min_size", es.min_size},
                            {"supports", sup},
                            {"exact", es.exact},
                            {"subsets_checked", es.subsets_checked}};
  }
  write_file(dir / "vcm.json", dump_json(doc));
  write_file(dir / "relaxations.csv", relaxation_csv(d, r).str());
  if (!apply.empty()) save_dataset(apply_relaxations(d, r), apply);
  for (const auto& w : doc["warnings"]) err << "warning: " << w.get<std::string>() << "\n";
  out << "rVCM interval [" << format_double(r.value_lower) << ", " << format_double(r.value_upper)
      << "]\n";
  if (r.value_upper <= cfg.tol) return kConsistent;
  if (r.has_lower && r.value_lower > cfg.tol) return kInconsistent;
  if (solver_broke(r.sdp_status)) {
    err << "relaxation solver: " << conic::to_string(r.sdp_status) << "\n";
    return kSolverFailure;
  }
  return kUndetermined;
}

int cmd_iterate(const RunConfig& cfg, const std::string& strategy, int k, int max_rounds,
                std::ostream& out, std::ostream& err) {
  const Dataset d = load(cfg, err);
  RemovalStrategy rs;
  if (strategy == "top_k") rs.kind = RemovalStrategy::Kind::top_k;
  else if (strategy == "nth") rs.kind = RemovalStrategy::Kind::nth;
  else if (strategy == "all_nonzero") rs.kind = RemovalStrategy::Kind::all_nonzero;
  else throw InputError("unknown strategy '" + strategy + "'");
  rs.k = k;
  const IterationTrace t = iterative_scm(d, rs, max_rounds, ScmOptions{local_options(cfg), sdp_options(cfg)});
  write_file(out_dir(cfg) / "trace.json", dump_json(trace_json(t)));
  out << t.removed.size() << " QOI(s) removed";
  for (const auto& name : t.removed) out << " " << name;
  out << "\n";
  return t.consistent ? kConsistent : kUndetermined;
}

int cmd_tradeoff(const RunConfig& cfg, const std::string& first, const std::string& second,
                 int samples, std::ostream& out, std::ostream& err) {
  const Dataset d = load(cfg, err);
  BoundRef a, b;
  try {
    a = parse_bound_ref(d, first);
    b = parse_bound_ref(d, second);
  } catch (const Error& e) {
    throw InputError(e.what());
  }
  const TradeoffScan s =
      tradeoff_scan(d, a, b, samples, cfg.seed, VcmOptions{local_options(cfg), sdp_options(cfg)});
  const fs::path dir = out_dir(cfg);
  write_file(dir / "tradeoff.csv", tradeoff_csv(s).str());
  write_file(dir / "tradeoff.json", dump_json(tradeoff_json(d, s)));
  int feasible = 0;
  for (const auto& p : s.points) feasible += p.feasible;
  out << s.points.size() << " directions, " << feasible << " restore consistency\n";
  return kConsistent;
}

int cmd_trials(const RunConfig& cfg, TrialConfig tc, const std::string& policy, std::ostream& out) {
  if (policy == "fixed") tc.alpha.kind = AlphaPolicy::Kind::fixed;
  else if (policy == "threshold") tc.alpha.kind = AlphaPolicy::Kind::threshold_factor;
  else throw InputError("unknown alpha policy '" + policy + "'");
  tc.seed = cfg.seed;
  const TrialStats st = run_trials(tc);
  const fs::path dir = out_dir(cfg);
  write_file(dir / "trials.csv", trials_csv(st).str());
  write_file(dir / "summary.json", dump_json(trial_summary_json(tc, st)));
  write_file(dir / "histogram_phi_E.csv", histogram_csv(st.phi_e).str());
  write_file(dir / "histogram_phi_delta.csv", histogram_csv(st.phi_delta).str());
  out << st.summary.completed << " trials, " << st.summary.skipped << " skipped, perfect recovery "
      << format_double(st.summary.fraction_perfect) << "\n";
  return kConsistent;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Consistency analysis of interval-bounded quadratic models"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* validate = app.add_subcommand("validate", "check a dataset file");
  add_common(validate, cfg);

  auto* scalar = app.add_subcommand("scalar", "scalar consistency measure and sensitivities");
  add_common(scalar, cfg);

  std::string apply;
  int support = -1;
  auto* vector = app.add_subcommand("vector", "vector consistency measure and relaxations");
  add_common(vector, cfg);
  add_scheme(vector, cfg);
  vector->add_option("--apply", apply, "write the relaxed dataset to this file");
  vector->add_option("--support", support, "enumerate exact relaxation supports up to this size");

  std::string strategy = "top_k";
  int k = 1, max_rounds = 100;
  auto* iterate = app.add_subcommand("iterate", "remove high-sensitivity QOIs until consistent");
  add_common(iterate, cfg);
  iterate->add_option("--strategy", strategy, "top_k|nth|all_nonzero");
  iterate->add_option("--k", k, "count for top_k, rank for nth")->check(CLI::PositiveNumber);
  iterate->add_option("--max-rounds", max_rounds, "round limit")->check(CLI::NonNegativeNumber);

  std::string first, second;
  int samples = 64;
  auto* tradeoff = app.add_subcommand("tradeoff", "two-bound relaxation trade-off scan");
  add_common(tradeoff, cfg);
  tradeoff->add_option("--first", first, "first bound, kind:name")->required();
  tradeoff->add_option("--second", second, "second bound, kind:name")->required();
  tradeoff->add_option("--samples", samples, "interior directions")->check(CLI::NonNegativeNumber);

  TrialConfig tc;
  std::string policy = "threshold";
  auto* trials = app.add_subcommand("trials", "injected-error linear trials");
  add_common(trials, cfg, false);
  trials->add_option("--m", tc.m, "rows");
  trials->add_option("--n", tc.n, "columns");
  trials->add_option("--errors", tc.n_errors, "injected errors per trial");
  trials->add_option("--trials", tc.trials, "trial count")->check(CLI::NonNegativeNumber);
  trials->add_option("--alpha-policy", policy, "fixed|threshold");
  trials->add_option("--alpha", tc.alpha.value, "alpha, or the factor on the threshold");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kConsistent;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  try {
    if (validate->parsed()) return cmd_validate(cfg, out, err);
    if (scalar->parsed()) return cmd_scalar(cfg, out, err);
    if (vector->parsed()) return cmd_vector(cfg, apply, support, out, err);
    if (iterate->parsed()) return cmd_iterate(cfg, strategy, k, max_rounds, out, err);
    if (tradeoff->parsed()) return cmd_tradeoff(cfg, first, second, samples, out, err);
    if (trials->parsed()) return cmd_trials(cfg, tc, policy, out);
  } catch (const NullCoefficientInfeasible& e) {
    err << "error: " << e.what() << "\n";
    return kNullInfeasible;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const ValidationError& e) {
    err << "error: " << e.report().summary() << "\n";
    return kInputError;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kSolverFailure;
  }
  return kInputError;
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace consist::cli
