// One line per criterion; exit status is the number of failures.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "consist/linear.hpp"
#include "consist/scalar.hpp"
#include "consist/vector.hpp"
#include "support/cli_runner.hpp"
#include "support/oracles.hpp"
#include "support/random_datasets.hpp"

using namespace consist;

namespace {

// Pinned tolerances.
constexpr double kGoldenScm = -1.0857;
constexpr double kGoldenScmTol = 1e-3;
constexpr double kZeroTol = 1e-6;
constexpr double kDeltaTol = 1e-6;
constexpr double kSupportTol = 1e-7;
constexpr double kDualityTol = 1e-6;
constexpr double kLpTol = 1e-9;
constexpr double kSolveSeconds = 1.0;
constexpr double kTrialSeconds = 60.0;
constexpr double kPropertySeconds = 300.0;

int failures = 0;

void report(const std::string& id, bool pass, const std::string& detail) {
  std::printf("[%s] %s: %s\n", pass ? "PASS" : "FAIL", id.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <class F>
double timed(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return seconds_since(t0);
}

void golden_small_dataset() {
  const Dataset d = load_dataset(testing_support::fixture_path("two_param.json"));
  ScmSdp s;
  VcmSdp v;
  const double ts = timed([&] { s = scm_sdp_upper(d); });
  const double tv = timed([&] { v = vcm_sdp_lower(d, build_scheme(d, SchemeKind::unit, SchemeKind::unit)); });
  const bool pass = s.ok() && v.ok() && std::abs(s.gamma_upper - kGoldenScm) <= kGoldenScmTol &&
                    std::abs(v.value_lower) <= kZeroTol && ts < kSolveSeconds && tv < kSolveSeconds;
  report("1 two-parameter golden", pass,
         fmt("scm_sdp_upper=%.6f vcm_sdp_lower=%.2e (%.3fs, %.3fs)", s.gamma_upper, v.value_lower, ts, tv));
}

void golden_counterexample() {
  const TrialInstance c = counterexample_instance(4.0);
  Vector r(2);
  r << 2.0, 1.0;
  const LinearVcm v = linear_vcm(c.a, c.tightened_b(), r);
  const bool pass = v.status == conic::SolveStatus::optimal && std::abs(v.delta(0) - 0.75) <= kDeltaTol &&
                    std::abs(v.delta(1)) <= kDeltaTol;
  report("2 weighted counterexample", pass, fmt("delta=(%.9f, %.9f)", v.delta(0), v.delta(1)));
}

void wrong_constraint() {
  bool pass = true;
  std::string detail;
  for (double alpha : {3.0, 4.0, 6.0, 10.0}) {
    const TrialInstance c = counterexample_instance(alpha);
    const LinearVcm v = linear_vcm(c.a, c.tightened_b(), Vector::Ones(2));
    const bool ok = v.status == conic::SolveStatus::optimal && std::abs(v.delta(0)) <= kSupportTol &&
                    v.delta(1) > kSupportTol;
    pass = pass && ok;
    detail += fmt("a=%g:(%.3g,%.3g) ", alpha, v.delta(0), v.delta(1));
  }
  report("3 support is the second constraint", pass, detail);
}

constexpr double kTrialAlpha = 10.0;

TrialStats trials_with(int n_errors, const AlphaPolicy& policy) {
  TrialConfig c;
  c.n_errors = n_errors;
  c.alpha = policy;
  return run_trials(c);
}

// Gross errors: one alpha shared by every trial. The default policy (just past
// the infeasibility threshold) is printed for reference only.
void trial_statistics() {
  const AlphaPolicy fixed{AlphaPolicy::Kind::fixed, kTrialAlpha};
  TrialStats s1, s4;
  const double t = timed([&] {
    s1 = trials_with(1, fixed);
    s4 = trials_with(4, fixed);
  });
  const bool pass1 = s1.summary.fraction_perfect >= 0.60;
  const bool pass4 = s4.summary.median_phi_e == 1.0 && s4.summary.median_phi_delta >= 0.4 &&
                     s4.summary.median_phi_delta <= 0.67;
  report("4 trial statistics", pass1 && pass4 && t < kTrialSeconds,
         fmt("alpha=%g: n_E=1 perfect=%.3f (%d done); n_E=4 median phi_E=%.3f phi_delta=%.3f (%d done); %.1fs",
             kTrialAlpha, s1.summary.fraction_perfect, s1.summary.completed, s4.summary.median_phi_e,
             s4.summary.median_phi_delta, s4.summary.completed, t));

  const TrialStats d1 = trials_with(1, AlphaPolicy{});
  const TrialStats d4 = trials_with(4, AlphaPolicy{});
  std::printf("[INFO] 4 default alpha policy: n_E=1 perfect=%.3f; n_E=4 median phi_E=%.3f phi_delta=%.3f\n",
              d1.summary.fraction_perfect, d4.summary.median_phi_e, d4.summary.median_phi_delta);
}

void unavailable_data() {
  std::printf("[NOT REPRODUCIBLE] 5 large published datasets: raw data unavailable, covered by 6\n");
}

double sdp_value(const VcmSdp& s) {
  if (s.ok()) return s.value_lower;
  if (s.solution.status == conic::SolveStatus::primal_infeasible) return INFINITY;
  return NAN;
}

void property_suite() {
  int dual_fail = 0, implication_fail = 0, mono_fail = 0, struct_fail = 0, sens_fail = 0, solver_fail = 0;
  int inconsistent = 0, implication_checked = 0;
  double worst_sens = -INFINITY;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto t0 = std::chrono::steady_clock::now();

  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Dataset d = testing_support::random_dataset(1000 + seed, 6, 10);
    const ScmResult s = scm(d);
    if (!s.sdp.ok()) {
      ++solver_fail;
      continue;
    }
    if (s.local_feasible && s.gamma_lower > s.gamma_upper + kDualityTol) ++dual_fail;

    const RelaxationScheme unit = build_scheme(d, SchemeKind::unit, SchemeKind::unit);
    const VcmResult v = vcm(d, unit);
    if (!v.has_lower) ++solver_fail;
    else if (v.value_lower > v.value_upper + kDualityTol) ++dual_fail;
    if (!check_structure(d, v).empty()) ++struct_fail;

    if (s.gamma_upper >= 0.0) {
      for (SchemeKind k : {SchemeKind::unit, SchemeKind::interval, SchemeKind::bound}) {
        ++implication_checked;
        const VcmSdp l = vcm_sdp_lower(d, build_scheme(d, k, k));
        if (!(l.ok() && l.value_lower <= kZeroTol)) ++implication_fail;
      }
    }

    // Null a random subset of the unit coefficients.
    RelaxationScheme fewer = unit;
    for (int e = 0; e < d.N(); ++e) {
      if (rng() % 2) fewer.qoi_lower(e) = 0.0;
      if (rng() % 2) fewer.qoi_upper(e) = 0.0;
    }
    for (int i = 0; i < d.n(); ++i) {
      if (rng() % 2) fewer.param_lower(i) = 0.0;
      if (rng() % 2) fewer.param_upper(i) = 0.0;
    }
    const double base = v.value_lower;
    const double nulled = sdp_value(vcm_sdp_lower(d, fewer));
    if (std::isnan(nulled)) ++solver_fail;
    else if (nulled < base - kDualityTol) ++mono_fail;

    if (s.gamma_upper >= 0.0) continue;
    ++inconsistent;
    const SensitivityReport rep = sensitivities(d, s.sdp);
    for (int trial = 0; trial < 50; ++trial) {
      PerturbationVector rho = PerturbationVector::zero(d);
      double bound = s.gamma_upper;
      for (const auto& item : rep.items) {
        const BoundRef& ref = item.ref;
        double width = 0.0;
        double* slot = nullptr;
        switch (ref.kind) {
          case BoundKind::qoi_lower:
          case BoundKind::qoi_upper:
            width = d.qois[ref.index].upper - d.qois[ref.index].lower;
            slot = ref.kind == BoundKind::qoi_lower ? &rho.qoi_lower(ref.index) : &rho.qoi_upper(ref.index);
            break;
          case BoundKind::param_lower:
          case BoundKind::param_upper:
            width = d.box.upper(ref.index) - d.box.lower(ref.index);
            slot = ref.kind == BoundKind::param_lower ? &rho.param_lower(ref.index) : &rho.param_upper(ref.index);
            break;
          case BoundKind::facet:
            break;
        }
        if (!slot || !std::isfinite(width)) continue;
        *slot = 0.3 * width * u(rng);
        bound += item.value * *slot / width;
      }
      const ScmResult p = scm_perturbed(d, rho);
      const double gap = p.gamma_lower - bound;
      worst_sens = std::max(worst_sens, gap);
      if (gap > kDualityTol) ++sens_fail;
    }
  }
  const double t = seconds_since(t0);
  report("6a weak duality", dual_fail == 0, fmt("%d violations", dual_fail));
  report("6b consistency implies zero relaxation", implication_fail == 0,
         fmt("%d of %d scheme checks violated", implication_fail, implication_checked));
  report("6c null-coefficient monotonicity", mono_fail == 0, fmt("%d violations", mono_fail));
  report("6d structure of local optima", struct_fail == 0, fmt("%d datasets with findings", struct_fail));
  report("6e affine sensitivity bound", sens_fail == 0,
         fmt("%d of %d perturbations violated, worst excess %.3g", sens_fail, 50 * inconsistent, worst_sens));
  report("6 runtime and solver health", t < kPropertySeconds && solver_fail == 0,
         fmt("%.1fs for 100 datasets, %d solver failures", t, solver_fail));
}

Dataset rows_as_dataset(const Matrix& a, const Vector& b) {
  Dataset d;
  d.name = "rows";
  const int n = static_cast<int>(a.cols());
  for (int j = 0; j < n; ++j) d.parameter_names.push_back("x" + std::to_string(j));
  d.box.lower = Vector::Constant(n, -INFINITY);
  d.box.upper = Vector::Constant(n, INFINITY);
  for (int i = 0; i < a.rows(); ++i) {
    d.qois.push_back({"r" + std::to_string(i), QuadraticModel::linear(0.0, a.row(i).transpose()), -1e6, b(i)});
  }
  return d;
}

void lp_oracle() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int value_fail = 0, support_fail = 0, skipped = 0;
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const int n = 1 + static_cast<int>(rng() % 3);
    const int m = n + 1 + static_cast<int>(rng() % (6 - n));
    Matrix a(m, n);
    Vector b(m), r(m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) a(i, j) = u(rng);
      b(i) = u(rng);
      r(i) = 0.5 + 0.4 * u(rng);
    }
    const auto ref = oracle::linear_vcm_value(a, b, r);
    if (!ref) {
      ++skipped;
      continue;
    }
    const LinearVcm v = linear_vcm(a, b, r);
    worst = std::max(worst, std::abs(v.value - *ref));
    if (!(std::abs(v.value - *ref) <= kLpTol)) ++value_fail;

    const Dataset d = rows_as_dataset(a, b);
    RelaxationScheme s = build_scheme(d, SchemeKind::null, SchemeKind::null);
    s.qoi_upper = r;
    const ExactSupport es = vcm_exact_support(d, s, m);
    const auto brute = oracle::exhaustive_support(a, b, r);
    bool same = es.min_size == brute.min_size && es.supports.size() == brute.supports.size();
    for (std::size_t k = 0; same && k < es.supports.size(); ++k) {
      std::vector<int> rows;
      for (const auto& bref : es.supports[k]) rows.push_back(bref.kind == BoundKind::qoi_upper ? bref.index : -1);
      same = rows == brute.supports[k];
    }
    if (!same) ++support_fail;
  }
  report("7 linear oracle agreement", value_fail == 0 && support_fail == 0 && skipped == 0,
         fmt("%d value and %d support mismatches in 200, worst |diff| %.2e, %d skipped", value_fail, support_fail,
             worst, skipped));
}

void determinism() {
  using testing_support::fixture_path;
  using testing_support::TempDir;
  const std::vector<std::vector<std::string>> cmds = {
      {"validate", "--dataset", fixture_path("two_param.json")},
      {"scalar", "--dataset", fixture_path("two_param.json")},
      {"vector", "--dataset", fixture_path("two_param.json")},
      {"vector", "--dataset", fixture_path("counterexample_alpha4.json"), "--scheme", "null", "--overrides",
       fixture_path("weighted_overrides.json"), "--support", "2"},
      {"iterate", "--dataset", fixture_path("conflict_1d.json")},
      {"tradeoff", "--dataset", fixture_path("vcm_conflict_1d.json"), "--first", "qoi_lower:M1", "--second",
       "qoi_upper:M2", "--samples", "16"},
      {"trials", "--m", "20", "--n", "6", "--errors", "2", "--trials", "50", "--seed", "11"},
  };
  int differ = 0;
  std::string which;
  for (const auto& base : cmds) {
    TempDir a("accept_a"), b("accept_b");
    auto ca = base, cb = base;
    ca.insert(ca.end(), {"--out", a.str()});
    cb.insert(cb.end(), {"--out", b.str()});
    if (base[0] == "validate") ca.resize(base.size()), cb.resize(base.size());
    const auto ra = testing_support::run_cli(ca);
    const auto rb = testing_support::run_cli(cb);
    if (ra.code != rb.code || ra.out != rb.out ||
        testing_support::snapshot(a.path()) != testing_support::snapshot(b.path())) {
      ++differ;
      which += " " + base[0];
    }
  }
  report("8 byte-identical reruns", differ == 0,
         fmt("%d of %zu commands differ%s", differ, cmds.size(), which.c_str()));
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria = {golden_small_dataset, golden_counterexample,
                                                       wrong_constraint,     trial_statistics,
                                                       unavailable_data,     property_suite,
                                                       lp_oracle,            determinism};
  for (const auto& c : criteria) {
    try {
      c();
    } catch (const std::exception& e) {
      report("exception", false, e.what());
    }
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
