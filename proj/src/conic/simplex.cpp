// Dense two-phase tableau simplex. The final primal/dual pair is recomputed
// from a fresh factorization of the optimal basis.

#include <cmath>
#include <limits>

#include "consist/conic.hpp"

namespace consist::conic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;

enum class VarMap { shifted_lower, shifted_upper, split };

struct ColumnMap {
  VarMap kind;
  int p = -1;  // standard column
  int q = -1;  // second column for split variables
};

struct StandardForm {
  Matrix a;  // rows x cols, before artificials
  Vector b;  // nonnegative
  Vector c;
  std::vector<double> flip;  // +-1 per row
  int user_rows = 0;
  std::vector<int> slack_col;  // per row, -1 if none
  std::vector<ColumnMap> vars;
  double objective_offset = 0.0;
};

StandardForm standardize(const LinearProgram& lp) {
  const int n = static_cast<int>(lp.c.size());
  const int m = static_cast<int>(lp.b.size());
  StandardForm sf;
  sf.user_rows = m;

  // Column layout: structural columns, then one slack per inequality or bound row.
  int cols = 0;
  std::vector<int> bounded;  // variables needing an explicit upper-bound row
  for (int j = 0; j < n; ++j) {
    const double l = lp.lower(j);
    const double u = lp.upper(j);
    ColumnMap cm;
    if (std::isfinite(l)) {
      cm.kind = VarMap::shifted_lower;
      cm.p = cols++;
      if (std::isfinite(u)) bounded.push_back(j);
    } else if (std::isfinite(u)) {
      cm.kind = VarMap::shifted_upper;
      cm.p = cols++;
    } else {
      cm.kind = VarMap::split;
      cm.p = cols++;
      cm.q = cols++;
    }
    sf.vars.push_back(cm);
  }
  const int rows = m + static_cast<int>(bounded.size());
  int slacks = static_cast<int>(bounded.size());
  for (auto r : lp.relations) {
    if (r != Relation::equal) ++slacks;
  }
  sf.a = Matrix::Zero(rows, cols + slacks);
  sf.b = Vector::Zero(rows);
  sf.c = Vector::Zero(cols + slacks);
  sf.flip.assign(rows, 1.0);
  sf.slack_col.assign(rows, -1);

  for (int j = 0; j < n; ++j) {
    const auto& cm = sf.vars[j];
    switch (cm.kind) {
      case VarMap::shifted_lower:
        sf.c(cm.p) = lp.c(j);
        sf.objective_offset += lp.c(j) * lp.lower(j);
        break;
      case VarMap::shifted_upper:
        sf.c(cm.p) = -lp.c(j);
        sf.objective_offset += lp.c(j) * lp.upper(j);
        break;
      case VarMap::split:
        sf.c(cm.p) = lp.c(j);
        sf.c(cm.q) = -lp.c(j);
        break;
    }
  }

  int next_slack = cols;
  for (int i = 0; i < m; ++i) {
    double rhs = lp.b(i);
    for (int j = 0; j < n; ++j) {
      const double v = lp.a(i, j);
      if (v == 0.0) continue;
      const auto& cm = sf.vars[j];
      switch (cm.kind) {
        case VarMap::shifted_lower:
          sf.a(i, cm.p) += v;
          rhs -= v * lp.lower(j);
          break;
        case VarMap::shifted_upper:
          sf.a(i, cm.p) -= v;
          rhs -= v * lp.upper(j);
          break;
        case VarMap::split:
          sf.a(i, cm.p) += v;
          sf.a(i, cm.q) -= v;
          break;
      }
    }
    if (lp.relations[i] == Relation::less_equal) {
      sf.a(i, next_slack) = 1.0;
      sf.slack_col[i] = next_slack++;
    } else if (lp.relations[i] == Relation::greater_equal) {
      sf.a(i, next_slack) = -1.0;
      sf.slack_col[i] = next_slack++;
    }
    sf.b(i) = rhs;
  }
  for (std::size_t k = 0; k < bounded.size(); ++k) {
    const int i = m + static_cast<int>(k);
    const int j = bounded[k];
    sf.a(i, sf.vars[j].p) = 1.0;
    sf.a(i, next_slack) = 1.0;
    sf.slack_col[i] = next_slack++;
    sf.b(i) = lp.upper(j) - lp.lower(j);
  }
  for (int i = 0; i < rows; ++i) {
    if (sf.b(i) < 0.0) {
      sf.a.row(i) *= -1.0;
      sf.b(i) *= -1.0;
      sf.flip[i] = -1.0;
    }
  }
  return sf;
}

class Tableau {
 public:
  Tableau(const StandardForm& sf) : rows_(static_cast<int>(sf.b.size())) {
    structural_ = static_cast<int>(sf.a.cols());
    // Identity columns: a slack with +1 after the row flip, otherwise an artificial.
    std::vector<int> basis(rows_, -1);
    int artificials = 0;
    for (int i = 0; i < rows_; ++i) {
      const int s = sf.slack_col[i];
      if (s >= 0 && sf.a(i, s) == 1.0) {
        basis[i] = s;
      } else {
        ++artificials;
      }
    }
    cols_ = structural_ + artificials;
    t_ = Matrix::Zero(rows_, cols_);
    t_.leftCols(structural_) = sf.a;
    rhs_ = sf.b;
    int next = structural_;
    for (int i = 0; i < rows_; ++i) {
      if (basis[i] < 0) {
        t_(i, next) = 1.0;
        basis[i] = next++;
      }
    }
    basis_ = basis;
    initial_basis_ = basis;
    active_.assign(rows_, true);
  }

  int structural() const { return structural_; }
  int cols() const { return cols_; }
  bool is_artificial(int j) const { return j >= structural_; }
  const std::vector<int>& basis() const { return basis_; }
  const std::vector<int>& initial_basis() const { return initial_basis_; }
  const std::vector<bool>& active() const { return active_; }
  const Matrix& t() const { return t_; }
  const Vector& rhs() const { return rhs_; }

  /// Runs the primal simplex on cost vector c (length cols_), with columns
  /// `allowed` eligible to enter. Returns optimal, dual_infeasible or max_iter.
  SolveStatus optimize(const Vector& c, const std::vector<bool>& allowed, int max_iter,
                       int& iterations) {
    int degenerate_run = 0;
    while (true) {
      if (iterations >= max_iter) return SolveStatus::max_iter;
      Vector reduced = reduced_costs(c);
      const bool bland = degenerate_run > 50;
      int enter = -1;
      double best = -kCostTol;
      for (int j = 0; j < cols_; ++j) {
        if (!allowed[j] || reduced(j) >= best) continue;
        if (in_basis(j)) continue;
        enter = j;
        best = reduced(j);
        if (bland) break;
      }
      if (enter < 0) return SolveStatus::optimal;
      int leave = -1;
      double ratio = kInf;
      double leave_piv = 0.0;
      for (int i = 0; i < rows_; ++i) {
        if (!active_[i]) continue;
        const double piv = t_(i, enter);
        if (piv <= kPivotTol) continue;
        const double r = std::max(rhs_(i), 0.0) / piv;
        const bool better = r < ratio - 1e-12 ||
                            (r <= ratio + 1e-12 && (bland ? basis_[i] < basis_[leave]
                                                          : piv > leave_piv));
        if (leave < 0 || better) {
          leave = i;
          ratio = r;
          leave_piv = piv;
        }
      }
      if (leave < 0) return SolveStatus::dual_infeasible;
      degenerate_run = ratio <= 1e-12 ? degenerate_run + 1 : 0;
      pivot(leave, enter);
      ++iterations;
    }
  }

  void pivot(int r, int col) {
    const double piv = t_(r, col);
    t_.row(r) /= piv;
    rhs_(r) /= piv;
    for (int i = 0; i < rows_; ++i) {
      if (i == r || !active_[i]) continue;
      const double f = t_(i, col);
      if (f == 0.0) continue;
      t_.row(i) -= f * t_.row(r);
      rhs_(i) -= f * rhs_(r);
    }
    basis_[r] = col;
  }

  void deactivate(int r) { active_[r] = false; }

  bool in_basis(int j) const {
    for (int i = 0; i < rows_; ++i) {
      if (active_[i] && basis_[i] == j) return true;
    }
    return false;
  }

  Vector reduced_costs(const Vector& c) const {
    Vector r = c;
    for (int i = 0; i < rows_; ++i) {
      if (!active_[i]) continue;
      const double cb = c(basis_[i]);
      if (cb != 0.0) r -= cb * t_.row(i).transpose();
    }
    return r;
  }

  /// Duals y' = c_B' B^{-1}, read from the columns of the initial identity basis.
  Vector duals(const Vector& c) const {
    Vector y = Vector::Zero(rows_);
    for (int i = 0; i < rows_; ++i) {
      if (!active_[i]) continue;
      const double cb = c(basis_[i]);
      if (cb == 0.0) continue;
      for (int k = 0; k < rows_; ++k) y(k) += cb * t_(i, initial_basis_[k]);
    }
    return y;
  }

 private:
  int rows_ = 0;
  int structural_ = 0;
  int cols_ = 0;
  Matrix t_;
  Vector rhs_;
  std::vector<int> basis_;
  std::vector<int> initial_basis_;
  std::vector<bool> active_;
};

Vector recover_x(const LinearProgram& lp, const StandardForm& sf, const Vector& z) {
  const int n = static_cast<int>(lp.c.size());
  Vector x(n);
  for (int j = 0; j < n; ++j) {
    const auto& cm = sf.vars[j];
    switch (cm.kind) {
      case VarMap::shifted_lower: x(j) = lp.lower(j) + z(cm.p); break;
      case VarMap::shifted_upper: x(j) = lp.upper(j) - z(cm.p); break;
      case VarMap::split: x(j) = z(cm.p) - z(cm.q); break;
    }
  }
  return x;
}

}  // namespace

LinearProgram make_lp(int n, Sense sense) {
  LinearProgram lp;
  lp.sense = sense;
  lp.c = Vector::Zero(n);
  lp.a = Matrix::Zero(0, n);
  lp.b = Vector::Zero(0);
  lp.lower = Vector::Constant(n, -kInf);
  lp.upper = Vector::Constant(n, kInf);
  return lp;
}

void add_row(LinearProgram& lp, const Vector& row, Relation relation, double rhs) {
  const auto m = lp.a.rows();
  lp.a.conservativeResize(m + 1, Eigen::NoChange);
  lp.a.row(m) = row.transpose();
  lp.b.conservativeResize(m + 1);
  lp.b(m) = rhs;
  lp.relations.push_back(relation);
}

LpResult solve_linear_program(const LinearProgram& lp_in, int max_iter) {
  const int n = static_cast<int>(lp_in.c.size());
  const int m = static_cast<int>(lp_in.b.size());
  if (lp_in.a.rows() != m || lp_in.a.cols() != n || static_cast<int>(lp_in.relations.size()) != m ||
      lp_in.lower.size() != n || lp_in.upper.size() != n) {
    throw DimensionError("linear program dimensions are inconsistent");
  }
  for (int j = 0; j < n; ++j) {
    if (lp_in.lower(j) > lp_in.upper(j)) {
      LpResult r;
      r.status = SolveStatus::primal_infeasible;
      r.farkas = Vector::Zero(m);
      return r;
    }
  }
  LinearProgram lp = lp_in;
  if (lp.sense == Sense::maximize) lp.c = -lp.c;

  const StandardForm sf = standardize(lp);
  const int rows = static_cast<int>(sf.b.size());
  Tableau tab(sf);
  LpResult result;

  // Phase 1.
  Vector c1 = Vector::Zero(tab.cols());
  for (int j = tab.structural(); j < tab.cols(); ++j) c1(j) = 1.0;
  std::vector<bool> allowed(tab.cols(), true);
  SolveStatus st = tab.optimize(c1, allowed, max_iter, result.iterations);
  if (st == SolveStatus::max_iter) {
    result.status = st;
    return result;
  }
  double infeas = 0.0;
  for (int i = 0; i < rows; ++i) {
    if (tab.is_artificial(tab.basis()[i])) infeas += tab.rhs()(i);
  }
  const double scale = 1.0 + sf.b.cwiseAbs().maxCoeff();
  if (infeas > 1e-9 * scale) {
    const Vector y = tab.duals(c1);
    result.status = SolveStatus::primal_infeasible;
    result.farkas = Vector::Zero(m);
    for (int i = 0; i < m; ++i) result.farkas(i) = -sf.flip[i] * y(i);
    return result;
  }
  // Drive remaining artificials out of the basis; drop redundant rows.
  for (int i = 0; i < rows; ++i) {
    if (!tab.is_artificial(tab.basis()[i])) continue;
    int col = -1;
    double best = kPivotTol;
    for (int j = 0; j < tab.structural(); ++j) {
      if (std::abs(tab.t()(i, j)) > best && !tab.in_basis(j)) {
        best = std::abs(tab.t()(i, j));
        col = j;
      }
    }
    if (col >= 0) {
      tab.pivot(i, col);
    } else {
      tab.deactivate(i);
    }
  }

  // Phase 2.
  Vector c2 = Vector::Zero(tab.cols());
  c2.head(tab.structural()) = sf.c;
  for (int j = tab.structural(); j < tab.cols(); ++j) allowed[j] = false;
  st = tab.optimize(c2, allowed, max_iter, result.iterations);
  if (st != SolveStatus::optimal) {
    result.status = st;
    return result;
  }

  // Recompute the vertex and duals from the optimal basis.
  std::vector<int> active_rows;
  std::vector<int> basic_cols;
  for (int i = 0; i < rows; ++i) {
    if (!tab.active()[i]) continue;
    active_rows.push_back(i);
    basic_cols.push_back(tab.basis()[i]);
  }
  const int k = static_cast<int>(active_rows.size());
  Matrix basis(k, k);
  Vector rhs(k);
  Vector cb(k);
  for (int r = 0; r < k; ++r) {
    rhs(r) = sf.b(active_rows[r]);
    cb(r) = sf.c(basic_cols[r]);
    for (int cidx = 0; cidx < k; ++cidx) basis(r, cidx) = sf.a(active_rows[r], basic_cols[cidx]);
  }
  Eigen::PartialPivLU<Matrix> lu(basis);
  Vector zb = lu.solve(rhs);
  Vector yk = lu.transpose().solve(cb);
  // Fall back to tableau values if the refactorization is unreliable.
  if (!zb.allFinite() || (basis * zb - rhs).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    zb = Vector(k);
    for (int r = 0; r < k; ++r) zb(r) = tab.rhs()(active_rows[r]);
    yk = Vector::Zero(k);
    const Vector yfull = tab.duals(c2);
    for (int r = 0; r < k; ++r) yk(r) = yfull(active_rows[r]);
  }
  Vector z = Vector::Zero(sf.a.cols());
  for (int r = 0; r < k; ++r) z(basic_cols[r]) = std::max(zb(r), 0.0);
  Vector y = Vector::Zero(rows);
  for (int r = 0; r < k; ++r) y(active_rows[r]) = yk(r);

  result.status = SolveStatus::optimal;
  result.x = recover_x(lp, sf, z);
  result.objective = lp_in.c.dot(result.x);
  result.sensitivity = Vector(m);
  const double sign = lp_in.sense == Sense::maximize ? -1.0 : 1.0;
  for (int i = 0; i < m; ++i) result.sensitivity(i) = sign * sf.flip[i] * y(i);
  return result;
}

}  // namespace consist::conic
