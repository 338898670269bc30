// Minimal-cardinality relaxation supports by subset enumeration.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "consist/vector.hpp"

namespace consist {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

// Visits every k-subset of [0, total) in lexicographic order until visit returns false.
void for_each_subset(int total, int k, const std::function<bool(const std::vector<int>&)>& visit) {
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    if (!visit(idx)) return;
    int i = k - 1;
    while (i >= 0 && idx[i] == total - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

bool is_param(const SystemRow& r) {
  return r.ref.kind == BoundKind::param_lower || r.ref.kind == BoundKind::param_upper;
}

// The system without the rows in `freed` (indices into sys.rows).
ConstraintSystem drop_rows(const ConstraintSystem& sys, const std::vector<int>& freed) {
  ConstraintSystem out;
  out.n = sys.n;
  out.lower = sys.lower;
  out.upper = sys.upper;
  for (int k = 0; k < static_cast<int>(sys.rows.size()); ++k) {
    const SystemRow& r = sys.rows[k];
    if (std::find(freed.begin(), freed.end(), k) != freed.end()) {
      if (r.ref.kind == BoundKind::param_upper) out.upper(r.ref.index) = kInf;
      if (r.ref.kind == BoundKind::param_lower) out.lower(r.ref.index) = -kInf;
      continue;
    }
    out.rows.push_back(r);
  }
  return out;
}

bool linear_feasible(const ConstraintSystem& sys) {
  conic::LinearProgram lp = conic::make_lp(sys.n);
  lp.lower = sys.lower;
  lp.upper = sys.upper;
  for (const auto& r : sys.rows) {
    if (is_param(r)) continue;
    conic::add_row(lp, r.a.tail(sys.n), conic::Relation::less_equal, -r.a(0));
  }
  return conic::solve_linear_program(lp).status == conic::SolveStatus::optimal;
}

// Local feasibility: every remaining row becomes soft with unit coefficient.
bool local_feasible(ConstraintSystem sys, const LocalOptions& options) {
  for (auto& r : sys.rows) r.coefficient = is_param(r) ? 0.0 : 1.0;
  const LocalOutcome lo = minimize_relaxation(sys, options);
  return lo.feasible && lo.value <= 1e-9;
}

// Certified infeasibility of a quadratic system through the scalar relaxation.
bool certified_infeasible(const ConstraintSystem& sys, const SdpOptions& options) {
  bool weighted = false;
  for (const auto& r : sys.rows) weighted = weighted || r.weight > 0.0;
  if (!weighted) return !linear_feasible(sys);
  const ScmSdp sdp = scm_sdp_system(sys, options);
  if (sdp.solution.status == conic::SolveStatus::primal_infeasible) return true;
  return sdp.ok() && sdp.gamma_upper < -1e-7;
}

}  // namespace

void check_enumeration_budget(int total, int max_support) {
  if (binomial(total, max_support) > 1e6) {
    throw Error("support enumeration over " + std::to_string(total) + " bounds up to size " +
                std::to_string(max_support) + " exceeds the budget of 1e6 subsets");
  }
}

ExactSupport vcm_exact_support(const Dataset& dataset, const RelaxationScheme& scheme,
                               int max_support, const VcmOptions& options) {
  const ConstraintSystem sys = make_system(dataset, &scheme);
  std::vector<int> candidates;
  for (int k = 0; k < static_cast<int>(sys.rows.size()); ++k) {
    if (sys.rows[k].coefficient > 0.0) candidates.push_back(k);
  }
  const int total = static_cast<int>(candidates.size());
  max_support = std::min(max_support, total);
  check_enumeration_budget(total, max_support);
  const bool linear = sys.all_linear();

  ExactSupport out;
  auto freed_rows = [&](const std::vector<int>& subset) {
    std::vector<int> rows;
    for (int i : subset) rows.push_back(candidates[i]);
    return rows;
  };
  for (int k = 0; k <= max_support && out.min_size < 0; ++k) {
    for_each_subset(total, k, [&](const std::vector<int>& subset) {
      ++out.subsets_checked;
      const ConstraintSystem sub = drop_rows(sys, freed_rows(subset));
      const bool ok = linear ? linear_feasible(sub) : local_feasible(sub, options.local);
      if (ok) {
        std::vector<BoundRef> support;
        for (int i : subset) support.push_back(sys.rows[candidates[i]].ref);
        out.supports.push_back(std::move(support));
        out.min_size = k;
      }
      return true;
    });
  }
  if (out.min_size < 0) return out;
  if (linear) {
    out.exact = out.lower_certified = true;
    return out;
  }
  // Every support of size min_size - 1 must be certified infeasible; smaller
  // supports are contained in one of them.
  bool certified = true;
  if (out.min_size > 0) {
    for_each_subset(total, out.min_size - 1, [&](const std::vector<int>& subset) {
      certified = certified_infeasible(drop_rows(sys, freed_rows(subset)), options.sdp);
      return certified;
    });
  }
  out.lower_certified = certified;
  out.exact = certified;
  return out;
}

ExactSupport exact_support_linear(const Matrix& a, const Vector& b, const Vector& r, int max_support) {
  if (a.rows() != b.size() || r.size() != b.size()) {
    throw DimensionError("exact support: A, b and r sizes disagree");
  }
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  std::vector<int> candidates;
  for (int i = 0; i < m; ++i) {
    if (r(i) > 0.0) candidates.push_back(i);
  }
  const int total = static_cast<int>(candidates.size());
  max_support = std::min(max_support, total);
  check_enumeration_budget(total, max_support);
  ExactSupport out;
  out.exact = out.lower_certified = true;
  for (int k = 0; k <= max_support && out.min_size < 0; ++k) {
    for_each_subset(total, k, [&](const std::vector<int>& subset) {
      ++out.subsets_checked;
      std::vector<bool> freed(m, false);
      for (int i : subset) freed[candidates[i]] = true;
      conic::LinearProgram lp = conic::make_lp(n);
      for (int i = 0; i < m; ++i) {
        if (!freed[i]) conic::add_row(lp, a.row(i).transpose(), conic::Relation::less_equal, b(i));
      }
      if (conic::solve_linear_program(lp).status == conic::SolveStatus::optimal) {
        std::vector<BoundRef> support;
        for (int i : subset) support.push_back({BoundKind::facet, candidates[i]});
        out.supports.push_back(std::move(support));
        out.min_size = k;
      }
      return true;
    });
  }
  return out;
}

}  // namespace consist
