#include "consist/scalar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "products.hpp"

namespace consist {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_linear_bound(const SystemRow& r) { return r.weight == 0.0; }

}  // namespace

ScmSdp scm_sdp_system(const ConstraintSystem& sys, const SdpOptions& options) {
  using namespace conic;
  const int n = sys.n;
  ConicProblem p;
  const int z = p.add_block(BlockKind::psd, n + 1);
  const int g = p.add_block(BlockKind::free, 1);

  ScmSdp out;
  std::vector<Vector> linear;
  for (const auto& r : sys.rows) {
    LinearForm f;
    if (is_linear_bound(r)) {
      for (int i = 0; i <= n; ++i) f.add(z, i, 0, r.a(i));
      linear.push_back(r.a);
    } else {
      f.add_matrix(z, 0, r.g);
      f.add(g, 0, r.weight);
    }
    const int c = p.add_constraint(std::move(f), Relation::less_equal, 0.0);
    out.bounds.push_back({r.ref, c, r.width});
  }
  for (const auto& [i, j] : detail::product_pairs(static_cast<int>(linear.size()), options)) {
    const Matrix prod = 0.5 * (linear[i] * linear[j].transpose() + linear[j] * linear[i].transpose());
    LinearForm f;
    f.add_matrix(z, 0, prod);
    p.add_constraint(std::move(f), Relation::greater_equal, 0.0);
    ++out.product_constraints;
  }
  LinearForm one;
  one.add(z, 0, 0, 1.0);
  p.add_constraint(std::move(one), Relation::equal, 1.0);
  LinearForm obj;
  obj.add(g, 0, 1.0);
  p.set_objective(Sense::maximize, obj);

  out.solution = solve_sdp(p, options.solver);
  out.gamma_upper = out.solution.optimal() ? out.solution.primal_objective : kInf;
  return out;
}

ScmSdp scm_sdp_upper(const Dataset& dataset, const SdpOptions& options) {
  if (dataset.N() == 0) throw Error("the scalar measure needs at least one QOI");
  return scm_sdp_system(make_system(dataset), options);
}

namespace {

ScmResult local_on(const Dataset& dataset, const ConstraintSystem& sys, const LocalOptions& options) {
  if (dataset.N() == 0) throw Error("the scalar measure needs at least one QOI");
  const LocalOutcome lo = maximize_tightening(sys, options);
  ScmResult res;
  res.local_feasible = lo.feasible;
  res.single_basin = lo.single_basin;
  if (lo.feasible) {
    res.gamma_lower = lo.value;
    res.x_witness = lo.x;
  } else {
    res.gamma_lower = -kInf;
  }
  res.gamma_upper = kInf;
  return res;
}

}  // namespace

ScmResult scm_local(const Dataset& dataset, const LocalOptions& options) {
  return local_on(dataset, make_system(dataset), options);
}

ScmResult scm(const Dataset& dataset, const ScmOptions& options) {
  const ConstraintSystem sys = make_system(dataset);
  ScmResult res = local_on(dataset, sys, options.local);
  res.sdp = scm_sdp_system(sys, options.sdp);
  res.gamma_upper = res.sdp.gamma_upper;
  return res;
}

ScmResult scm_perturbed(const Dataset& dataset, const PerturbationVector& rho,
                        const ScmOptions& options) {
  const ConstraintSystem sys = make_system(dataset, nullptr, &rho);
  for (int i = 0; i < sys.n; ++i) {
    if (sys.lower(i) >= sys.upper(i)) throw Error("perturbation empties the parameter box");
  }
  ScmResult res = local_on(dataset, sys, options.local);
  res.sdp = scm_sdp_system(sys, options.sdp);
  res.gamma_upper = res.sdp.gamma_upper;
  return res;
}

const SensitivityItem* SensitivityReport::find(const BoundRef& ref) const {
  for (const auto& it : items) {
    if (it.ref == ref) return &it;
  }
  return nullptr;
}

SensitivityReport sensitivities(const Dataset& dataset, const ScmSdp& sdp) {
  if (!sdp.ok()) {
    throw Error("sensitivities need an optimal relaxation (status " +
                conic::to_string(sdp.solution.status) + ")");
  }
  SensitivityReport rep;
  for (const auto& b : sdp.bounds) {
    SensitivityItem it;
    it.ref = b.ref;
    it.name = bound_name(dataset, b.ref);
    it.value = sdp.solution.multiplier(b.constraint) * b.width;
    rep.items.push_back(std::move(it));
  }
  rep.ranking.resize(rep.items.size());
  for (std::size_t i = 0; i < rep.ranking.size(); ++i) rep.ranking[i] = static_cast<int>(i);
  std::stable_sort(rep.ranking.begin(), rep.ranking.end(),
                   [&](int a, int b) { return rep.items[a].value > rep.items[b].value; });
  return rep;
}

std::vector<double> qoi_scores(const Dataset& dataset, const SensitivityReport& report) {
  std::vector<double> s(dataset.N(), 0.0);
  for (const auto& it : report.items) {
    if (it.ref.kind == BoundKind::qoi_upper || it.ref.kind == BoundKind::qoi_lower) {
      s[it.ref.index] = std::max(s[it.ref.index], it.value);
    }
  }
  return s;
}

std::vector<int> select_removals(const std::vector<double>& scores, const RemovalStrategy& strategy) {
  // Order by score, ties within 1e-9 to the lower index.
  std::vector<int> order;
  std::vector<bool> used(scores.size(), false);
  for (std::size_t round = 0; round < scores.size(); ++round) {
    int best = -1;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (used[i]) continue;
      if (best < 0 || scores[i] > scores[best] + 1e-9) best = static_cast<int>(i);
    }
    used[best] = true;
    order.push_back(best);
  }
  std::vector<int> out;
  if (order.empty()) return out;
  const double top = scores[order.front()];
  if (top <= 0.0) return out;
  switch (strategy.kind) {
    case RemovalStrategy::Kind::top_k:
      for (int i = 0; i < std::min<int>(strategy.k, static_cast<int>(order.size())); ++i) {
        if (scores[order[i]] > 0.0) out.push_back(order[i]);
      }
      break;
    case RemovalStrategy::Kind::nth:
      if (strategy.k >= 1 && strategy.k <= static_cast<int>(order.size()) &&
          scores[order[strategy.k - 1]] > 0.0) {
        out.push_back(order[strategy.k - 1]);
      }
      break;
    case RemovalStrategy::Kind::all_nonzero:
      for (int i : order) {
        if (scores[i] > strategy.threshold * top) out.push_back(i);
      }
      break;
  }
  return out;
}

Dataset remove_qois(const Dataset& dataset, const std::vector<std::string>& names) {
  Dataset out = dataset;
  out.qois.clear();
  for (const auto& q : dataset.qois) {
    if (std::find(names.begin(), names.end(), q.name) == names.end()) out.qois.push_back(q);
  }
  return out;
}

namespace {

bool facets_feasible(const Dataset& d) {
  conic::LinearProgram lp = conic::make_lp(d.n());
  lp.lower = d.box.lower;
  lp.upper = d.box.upper;
  for (const auto& a : d.facets) conic::add_row(lp, a.tail(d.n()), conic::Relation::less_equal, -a(0));
  return conic::solve_linear_program(lp).status == conic::SolveStatus::optimal;
}

}  // namespace

IterationTrace iterative_scm(const Dataset& dataset, const RemovalStrategy& strategy,
                             int max_rounds, const ScmOptions& options) {
  IterationTrace trace;
  Dataset current = dataset;
  for (int round = 0;; ++round) {
    IterationRound r;
    for (const auto& q : current.qois) r.qois.push_back(q.name);
    if (current.N() == 0) {
      if (!facets_feasible(current)) throw Error("every QOI was removed and the parameter domain is empty");
      r.gamma_lower = r.gamma_upper = kInf;
      trace.rounds.push_back(std::move(r));
      trace.consistent = true;
      break;
    }
    const ScmResult res = scm(current, options);
    r.gamma_lower = res.gamma_lower;
    r.gamma_upper = res.gamma_upper;
    if (res.gamma_lower >= 0.0) {
      trace.rounds.push_back(std::move(r));
      trace.consistent = true;
      break;
    }
    if (round >= max_rounds) {
      trace.rounds.push_back(std::move(r));
      break;
    }
    std::vector<double> scores(current.N(), 0.0);
    if (res.sdp.ok()) scores = qoi_scores(current, sensitivities(current, res.sdp));
    std::vector<int> pick = select_removals(scores, strategy);
    if (pick.empty()) {
      // No usable sensitivities: drop the QOI with the smallest slack at the witness.
      int worst = 0;
      if (res.local_feasible) {
        const Vector slack = normalized_slack(current, res.x_witness);
        for (int e = 1; e < current.N(); ++e) {
          if (slack(e) < slack(worst) - 1e-9) worst = e;
        }
      }
      pick.push_back(worst);
    }
    for (int e : pick) {
      r.removed.push_back(current.qois[e].name);
      r.removed_sensitivity.push_back(scores[e]);
      trace.removed.push_back(current.qois[e].name);
    }
    current = remove_qois(current, r.removed);
    trace.rounds.push_back(std::move(r));
  }
  return trace;
}

}  // namespace consist
