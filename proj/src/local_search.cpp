#include "consist/local_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "consist/conic.hpp"
#include "consist/parallel.hpp"

namespace consist {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kHardTol = 1e-9;

enum class Role { measured, soft, hard };

struct SlpProblem {
  bool maximize_min = false;  // true: tightening; false: relaxation
  const ConstraintSystem* sys = nullptr;
  std::vector<int> rows;
  std::vector<Role> roles;
  std::vector<double> scale;  // w_k for measured rows, c_k for soft rows
  Vector lower;
  Vector upper;
  double penalty = 1e3;
};

struct Evaluation {
  double merit = 0.0;       // to be maximized
  double objective = 0.0;   // exact measure (tightening or relaxation sum)
  double hard_violation = 0.0;
};

Evaluation evaluate(const SlpProblem& p, const Vector& x) {
  Evaluation ev;
  double tight = kInf;
  double relax = 0.0;
  double viol = 0.0;
  for (std::size_t k = 0; k < p.rows.size(); ++k) {
    const double f = p.sys->rows[p.rows[k]].value(x);
    switch (p.roles[k]) {
      case Role::measured: tight = std::min(tight, -f / p.scale[k]); break;
      case Role::soft: relax += std::max(0.0, f) / p.scale[k]; break;
      case Role::hard: viol += std::max(0.0, f); break;
    }
  }
  ev.hard_violation = viol;
  ev.objective = p.maximize_min ? tight : relax;
  ev.merit = (p.maximize_min ? tight : -relax) - p.penalty * viol;
  return ev;
}

struct StepResult {
  bool ok = false;
  Vector d;
  double model = 0.0;  // model merit at d
};

StepResult lp_step(const SlpProblem& p, const Vector& x, double radius) {
  const int n = static_cast<int>(x.size());
  const int r = static_cast<int>(p.rows.size());
  const int extra = p.maximize_min ? 1 : 0;
  int naux = 0;
  for (auto role : p.roles) naux += role == Role::measured ? 0 : 1;
  const int nv = n + extra + naux;
  conic::LinearProgram lp;
  lp.sense = conic::Sense::maximize;
  lp.c = Vector::Zero(nv);
  lp.a = Matrix::Zero(r, nv);
  lp.b = Vector(r);
  lp.relations.assign(r, conic::Relation::less_equal);
  lp.lower = Vector::Zero(nv);
  lp.upper = Vector::Constant(nv, kInf);
  for (int i = 0; i < n; ++i) {
    lp.lower(i) = std::max(p.lower(i) - x(i), -radius);
    lp.upper(i) = std::min(p.upper(i) - x(i), radius);
    if (lp.lower(i) > lp.upper(i)) lp.lower(i) = lp.upper(i) = 0.0;
  }
  if (p.maximize_min) {
    lp.c(n) = 1.0;
    lp.lower(n) = -kInf;
  }
  int aux = n + extra;
  for (int k = 0; k < r; ++k) {
    const SystemRow& row = p.sys->rows[p.rows[k]];
    lp.a.row(k).head(n) = row.gradient(x).transpose();
    lp.b(k) = -row.value(x);
    if (p.roles[k] != Role::measured) ++aux;
    switch (p.roles[k]) {
      case Role::measured:
        lp.a(k, n) = p.scale[k];
        break;
      case Role::soft:
        lp.a(k, aux - 1) = -1.0;
        lp.c(aux - 1) = -1.0 / p.scale[k];
        break;
      case Role::hard:
        lp.a(k, aux - 1) = -1.0;
        lp.c(aux - 1) = -p.penalty;
        break;
    }
  }
  const conic::LpResult res = conic::solve_linear_program(lp);
  StepResult out;
  if (res.status != conic::SolveStatus::optimal) return out;
  out.ok = true;
  out.d = res.x.head(n);
  out.model = res.objective;
  return out;
}

struct Trajectory {
  Vector x;
  Evaluation eval;
};

Trajectory run_slp(const SlpProblem& p, Vector x, int max_iter) {
  for (int i = 0; i < x.size(); ++i) x(i) = std::clamp(x(i), p.lower(i), p.upper(i));
  double radius = 0.5;
  for (int i = 0; i < x.size(); ++i) {
    const double w = p.upper(i) - p.lower(i);
    if (std::isfinite(w)) radius = std::max(radius, 0.25 * w);
  }
  Evaluation ev = evaluate(p, x);
  for (int it = 0; it < max_iter && radius > 1e-11; ++it) {
    const StepResult step = lp_step(p, x, radius);
    if (!step.ok) break;
    const double predicted = step.model - ev.merit;
    if (predicted <= 1e-13 * (1.0 + std::abs(ev.merit))) break;
    Vector xn = x + step.d;
    for (int i = 0; i < x.size(); ++i) xn(i) = std::clamp(xn(i), p.lower(i), p.upper(i));
    const Evaluation en = evaluate(p, xn);
    const double actual = en.merit - ev.merit;
    const double step_len = step.d.cwiseAbs().maxCoeff();
    if (actual >= 0.1 * predicted) {
      x = xn;
      ev = en;
      if (actual >= 0.75 * predicted && step_len >= 0.99 * radius) radius *= 2.0;
    } else {
      radius = 0.5 * std::min(radius, std::max(step_len, 1e-12));
    }
  }
  return {x, ev};
}

Vector start_box_lower(const Vector& l, const Vector& u) {
  Vector out(l.size());
  for (int i = 0; i < l.size(); ++i) {
    if (std::isfinite(l(i))) out(i) = l(i);
    else if (std::isfinite(u(i))) out(i) = u(i) - 2.0;
    else out(i) = -1.0;
  }
  return out;
}

Vector start_box_upper(const Vector& l, const Vector& u) {
  Vector out(l.size());
  for (int i = 0; i < l.size(); ++i) {
    if (std::isfinite(u(i))) out(i) = u(i);
    else if (std::isfinite(l(i))) out(i) = l(i) + 2.0;
    else out(i) = 1.0;
  }
  return out;
}

LocalOutcome multistart(const SlpProblem& p, const LocalOptions& options) {
  std::vector<Vector> starts = options.extra_starts;
  const auto lhs = latin_hypercube(p.lower, p.upper, options.starts, options.seed);
  starts.insert(starts.end(), lhs.begin(), lhs.end());
  const int count = static_cast<int>(starts.size());
  std::vector<Trajectory> finals(count);
  parallel_for(count, [&](int s) {
    if (starts[s].size() != p.lower.size()) {
      throw DimensionError("start point has length " + std::to_string(starts[s].size()) +
                           ", expected " + std::to_string(p.lower.size()));
    }
    finals[s] = run_slp(p, starts[s], options.max_iter);
  });

  LocalOutcome out;
  const double hard_tol = kHardTol;
  for (int s = 0; s < count; ++s) {
    const auto& t = finals[s];
    if (t.eval.hard_violation > hard_tol) continue;
    ++out.feasible_starts;
    const double v = p.maximize_min ? t.eval.objective : -t.eval.objective;
    const double best = p.maximize_min ? out.value : -out.value;
    if (!out.feasible || v > best + 1e-12 * (1.0 + std::abs(best))) {
      out.feasible = true;
      out.value = t.eval.objective;
      out.x = t.x;
      out.start_index = s;
    }
  }
  if (out.feasible && out.feasible_starts > 1) {
    out.single_basin = true;
    for (int s = 0; s < count && out.single_basin; ++s) {
      const auto& t = finals[s];
      if (t.eval.hard_violation > hard_tol) continue;
      if ((t.x - out.x).cwiseAbs().maxCoeff() > 1e-6 * (1.0 + out.x.cwiseAbs().maxCoeff())) {
        out.single_basin = false;
      }
    }
  }
  return out;
}

bool is_param(const SystemRow& r) {
  return r.ref.kind == BoundKind::param_lower || r.ref.kind == BoundKind::param_upper;
}

}  // namespace

std::vector<Vector> latin_hypercube(const Vector& lower, const Vector& upper, int count,
                                    std::uint64_t seed) {
  const int n = static_cast<int>(lower.size());
  const Vector lo = start_box_lower(lower, upper);
  const Vector hi = start_box_upper(lower, upper);
  std::mt19937_64 rng(mix_seed(seed, 0));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vector> pts(count, Vector(n));
  std::vector<int> perm(count);
  for (int i = 0; i < n; ++i) {
    std::iota(perm.begin(), perm.end(), 0);
    for (int k = count - 1; k > 0; --k) {
      const int j = static_cast<int>(rng() % static_cast<std::uint64_t>(k + 1));
      std::swap(perm[k], perm[j]);
    }
    for (int s = 0; s < count; ++s) {
      const double u = (perm[s] + unit(rng)) / count;
      pts[s](i) = lo(i) + u * (hi(i) - lo(i));
    }
  }
  return pts;
}

LocalOutcome maximize_tightening(const ConstraintSystem& system, const LocalOptions& options) {
  SlpProblem p;
  p.maximize_min = true;
  p.sys = &system;
  p.lower = system.lower;
  p.upper = system.upper;
  double max_inv = 0.0;  // penalty tracks the objective scale
  for (int k = 0; k < static_cast<int>(system.rows.size()); ++k) {
    const SystemRow& r = system.rows[k];
    if (is_param(r)) continue;
    p.rows.push_back(k);
    if (r.weight > 0.0) {
      p.roles.push_back(Role::measured);
      p.scale.push_back(r.weight);
      max_inv = std::max(max_inv, 1.0 / r.weight);
    } else {
      p.roles.push_back(Role::hard);
      p.scale.push_back(1.0);
    }
  }
  if (std::find(p.roles.begin(), p.roles.end(), Role::measured) == p.roles.end()) {
    throw Error("tightening search needs at least one QOI constraint");
  }
  p.penalty = 1e3 * max_inv;
  return multistart(p, options);
}

LocalOutcome minimize_relaxation(const ConstraintSystem& system, const LocalOptions& options) {
  SlpProblem p;
  p.sys = &system;
  p.lower = system.lower;
  p.upper = system.upper;
  double max_inv = 0.0;  // penalty tracks the objective scale
  for (int k = 0; k < static_cast<int>(system.rows.size()); ++k) {
    const SystemRow& r = system.rows[k];
    if (is_param(r)) {
      if (r.coefficient <= 0.0) continue;  // stays a simple bound
      const int i = r.ref.index;
      if (r.ref.kind == BoundKind::param_upper) p.upper(i) = kInf; else p.lower(i) = -kInf;
    }
    p.rows.push_back(k);
    if (r.coefficient > 0.0) {
      p.roles.push_back(Role::soft);
      p.scale.push_back(r.coefficient);
      max_inv = std::max(max_inv, 1.0 / r.coefficient);
    } else {
      p.roles.push_back(Role::hard);
      p.scale.push_back(1.0);
    }
  }
  p.penalty = max_inv > 0.0 ? 1e3 * max_inv : 1e3;
  // Starts are drawn from the original box even when its sides may move.
  LocalOptions opts = options;
  std::vector<Vector> starts = opts.extra_starts;
  const auto lhs = latin_hypercube(system.lower, system.upper, opts.starts, opts.seed);
  starts.insert(starts.end(), lhs.begin(), lhs.end());
  opts.extra_starts = std::move(starts);
  opts.starts = 0;
  return multistart(p, opts);
}

}  // namespace consist
