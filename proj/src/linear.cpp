#include "consist/linear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "consist/parallel.hpp"

namespace consist {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

LinearVcm linear_vcm(const Matrix& a, const Vector& b, const Vector& r) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  if (b.size() != m || r.size() != m) throw DimensionError("linear_vcm: A, b and r sizes disagree");
  if ((r.array() < 0.0).any()) throw Error("linear_vcm: coefficients must be nonnegative");
  conic::LinearProgram lp = conic::make_lp(n + m);
  for (int i = 0; i < m; ++i) {
    lp.lower(n + i) = 0.0;
    lp.upper(n + i) = r(i) > 0.0 ? kInf : 0.0;
    lp.c(n + i) = 1.0;
  }
  lp.a = Matrix::Zero(m, n + m);
  lp.a.leftCols(n) = a;
  for (int i = 0; i < m; ++i) lp.a(i, n + i) = -r(i);
  lp.b = b;
  lp.relations.assign(m, conic::Relation::less_equal);
  const conic::LpResult res = conic::solve_linear_program(lp);
  LinearVcm out;
  out.status = res.status;
  if (res.status == conic::SolveStatus::optimal) {
    out.x = res.x.head(n);
    out.delta = res.x.tail(m);
    out.value = out.delta.sum();
  }
  return out;
}

TrialInstance counterexample_instance(double alpha, bool* consistent) {
  TrialInstance inst;
  inst.a = Matrix(2, 1);
  inst.a << 1.5, -1.0;
  inst.b = Vector(2);
  inst.b << 1.0, 1.0;
  inst.t = Vector(2);
  inst.t << 1.0, 0.0;
  inst.alpha = alpha;
  if (consistent) *consistent = alpha <= 2.5;
  return inst;
}

RatioPair phi_ratios(const Vector& delta, const Vector& t, double zero_tol) {
  if (delta.size() != t.size()) throw DimensionError("phi_ratios: delta and t sizes disagree");
  int n_e = 0, n_d = 0, both = 0;
  for (int i = 0; i < t.size(); ++i) {
    const bool in_t = t(i) != 0.0;
    const bool in_d = std::abs(delta(i)) > zero_tol;
    n_e += in_t;
    n_d += in_d;
    both += in_t && in_d;
  }
  RatioPair r;
  r.phi_e = n_e > 0 ? static_cast<double>(both) / n_e : 1.0;
  if (n_d > 0) r.phi_delta = static_cast<double>(both) / n_d;
  else r.phi_delta = n_e == 0 ? 1.0 : 0.0;
  return r;
}

bool system_feasible(const Matrix& a, const Vector& b) {
  conic::LinearProgram lp = conic::make_lp(static_cast<int>(a.cols()));
  lp.a = a;
  lp.b = b;
  lp.relations.assign(a.rows(), conic::Relation::less_equal);
  return conic::solve_linear_program(lp).status == conic::SolveStatus::optimal;
}

double alpha_threshold(const Matrix& a, const Vector& b, const Vector& t) {
  const int n = static_cast<int>(a.cols());
  conic::LinearProgram lp = conic::make_lp(n + 1, conic::Sense::maximize);
  lp.c(n) = 1.0;
  lp.a = Matrix(a.rows(), n + 1);
  lp.a.leftCols(n) = a;
  lp.a.col(n) = t;
  lp.b = b;
  lp.relations.assign(a.rows(), conic::Relation::less_equal);
  const conic::LpResult res = conic::solve_linear_program(lp);
  if (res.status == conic::SolveStatus::dual_infeasible) return kInf;
  if (res.status != conic::SolveStatus::optimal) return -kInf;
  return res.objective;
}

bool make_trial(std::uint64_t seed, const TrialConfig& cfg, TrialInstance& out) {
  if (cfg.n < 1 || cfg.m <= cfg.n) throw Error("trial configuration needs m > n >= 1");
  if (cfg.n_errors < 1 || cfg.n_errors > cfg.m) throw Error("trial configuration needs 1 <= n_E <= m");
  for (int attempt = 0; attempt <= cfg.reseed_attempts; ++attempt) {
    const std::uint64_t s = attempt == 0 ? seed : mix_seed(seed, attempt);
    std::mt19937_64 rng(mix_seed(s, 0));
    std::uniform_real_distribution<double> sym(-1.0, 1.0);
    std::uniform_real_distribution<double> slack(cfg.slack_lo, cfg.slack_hi);
    TrialInstance inst;
    inst.seed = s;
    inst.a = Matrix(cfg.m, cfg.n);
    for (int i = 0; i < cfg.m; ++i) {
      for (int j = 0; j < cfg.n; ++j) inst.a(i, j) = sym(rng);
    }
    Vector x0(cfg.n);
    for (int j = 0; j < cfg.n; ++j) x0(j) = sym(rng);
    inst.b = inst.a * x0;
    for (int i = 0; i < cfg.m; ++i) inst.b(i) += slack(rng);
    std::vector<int> rows(cfg.m);
    for (int i = 0; i < cfg.m; ++i) rows[i] = i;
    for (int k = 0; k < cfg.n_errors; ++k) {
      const int pick = k + static_cast<int>(rng() % static_cast<std::uint64_t>(cfg.m - k));
      std::swap(rows[k], rows[pick]);
    }
    inst.t = Vector::Zero(cfg.m);
    for (int k = 0; k < cfg.n_errors; ++k) inst.t(rows[k]) = 1.0;
    if (cfg.alpha.kind == AlphaPolicy::Kind::fixed) {
      inst.alpha = cfg.alpha.value;
    } else {
      const double thr = alpha_threshold(inst.a, inst.b, inst.t);
      if (!std::isfinite(thr) || thr <= 0.0) continue;
      inst.alpha = cfg.alpha.value * thr;
    }
    if (system_feasible(inst.a, inst.tightened_b())) continue;
    out = std::move(inst);
    return true;
  }
  return false;
}

Histogram histogram(const std::vector<double>& values, int bins) {
  Histogram h;
  h.counts.assign(bins, 0);
  for (int k = 0; k <= bins; ++k) h.edges.push_back(static_cast<double>(k) / bins);
  for (double v : values) {
    const int k = std::clamp(static_cast<int>(std::floor(v * bins)), 0, bins - 1);
    ++h.counts[k];
  }
  return h;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

TrialStats run_trials(const TrialConfig& cfg) {
  TrialStats st;
  st.rows.resize(cfg.trials);
  parallel_for(cfg.trials, [&](int i) {
    TrialRow row;
    row.trial = i;
    TrialInstance inst;
    if (!make_trial(cfg.seed + static_cast<std::uint64_t>(i), cfg, inst)) {
      row.skipped = true;
    } else {
      row.alpha = inst.alpha;
      const LinearVcm lv = linear_vcm(inst.a, inst.tightened_b(), Vector::Ones(cfg.m));
      if (lv.status != conic::SolveStatus::optimal) {
        row.skipped = true;
      } else {
        const RatioPair r = phi_ratios(lv.delta, inst.t, cfg.zero_tol);
        row.phi_e = r.phi_e;
        row.phi_delta = r.phi_delta;
      }
    }
    st.rows[i] = row;
  });
  std::vector<double> pe, pd;
  int perfect = 0;
  for (const auto& r : st.rows) {
    if (r.skipped) {
      ++st.summary.skipped;
      continue;
    }
    pe.push_back(r.phi_e);
    pd.push_back(r.phi_delta);
    perfect += r.phi_e == 1.0 && r.phi_delta == 1.0;
  }
  st.summary.trials = cfg.trials;
  st.summary.completed = static_cast<int>(pe.size());
  if (!pe.empty()) {
    st.summary.fraction_perfect = static_cast<double>(perfect) / pe.size();
    st.summary.median_phi_e = median(pe);
    st.summary.median_phi_delta = median(pd);
    double se = 0.0, sd = 0.0;
    for (std::size_t k = 0; k < pe.size(); ++k) {
      se += pe[k];
      sd += pd[k];
    }
    st.summary.mean_phi_e = se / pe.size();
    st.summary.mean_phi_delta = sd / pd.size();
  }
  st.phi_e = histogram(pe);
  st.phi_delta = histogram(pd);
  return st;
}

}  // namespace consist
