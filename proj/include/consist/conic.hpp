#ifndef CONSIST_CONIC_HPP
#define CONSIST_CONIC_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "consist/dataset.hpp"

/// Small dense conic solvers: a primal-dual interior-point method for
/// semidefinite programs and a two-phase simplex method for linear programs.
namespace consist::conic {

enum class BlockKind { psd, nonnegative, free };

struct Block {
  BlockKind kind = BlockKind::psd;
  int size = 0;
};

/// Coefficient of one scalar variable. For a psd block, (row, col) and
/// (col, row) name the same variable; for vector blocks col is 0.
struct Entry {
  int block = 0;
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// A linear functional of the block variables, sum(value * X_block(row, col)).
/// An off-diagonal psd entry with value v is the symmetric matrix with v/2 at
/// (row, col) and (col, row).
class LinearForm {
 public:
  LinearForm& add(int block, int row, int col, double value);
  LinearForm& add(int block, int index, double value) { return add(block, index, 0, value); }
  /// Adds sum_ij scale*m(i,j)*X(offset+i, offset+j) for a symmetric matrix m.
  LinearForm& add_matrix(int block, int offset, const Matrix& m, double scale = 1.0);
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
};

enum class Relation { equal, less_equal, greater_equal };
enum class Sense { minimize, maximize };

struct Constraint {
  LinearForm form;
  Relation relation = Relation::equal;
  double rhs = 0.0;
  std::string label;
};

class ConicProblem {
 public:
  int add_block(BlockKind kind, int size);
  int add_constraint(LinearForm form, Relation relation, double rhs, std::string label = {});
  void set_objective(Sense sense, LinearForm form);

  const std::vector<Block>& blocks() const { return blocks_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const LinearForm& objective() const { return objective_; }
  Sense sense() const { return sense_; }

  /// Throws Error on out-of-range entries.
  void validate() const;

 private:
  std::vector<Block> blocks_;
  std::vector<Constraint> constraints_;
  LinearForm objective_;
  Sense sense_ = Sense::minimize;
};

enum class SolveStatus { optimal, primal_infeasible, dual_infeasible, max_iter, numerical_failure };

std::string to_string(SolveStatus status);

struct SolverOptions {
  double feas_tol = 1e-8;
  double gap_tol = 1e-8;
  double psd_tol = 1e-9;
  double loose_tol = 1e-6;  // accepted on breakdown near the optimum
  int max_iter = 200;
  int max_order = 200;  // largest psd block accepted
  bool verbose = false;
};

struct ConicSolution {
  SolveStatus status = SolveStatus::numerical_failure;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double gap = 0.0;              // |primal - dual| / (1 + |primal| + |dual|)
  double primal_residual = 0.0;  // relative
  double dual_residual = 0.0;    // relative
  int iterations = 0;

  /// Primal value per block: psd blocks as symmetric matrices, vector blocks
  /// as column vectors.
  std::vector<Matrix> blocks;
  /// d(optimal value)/d(rhs) for each constraint.
  Vector sensitivity;
  /// Constraint relations copied from the problem, and the sense.
  std::vector<Relation> relations;
  Sense sense = Sense::minimize;
  /**
   * Primal infeasibility certificate, when status is primal_infeasible:
   * multipliers y with y_i >= 0 on <= rows, y_i <= 0 on >= rows, such that
   * sum_i y_i A_i lies in the dual cone and sum_i y_i b_i < 0.
   */
  Vector farkas;

  double value(const LinearForm& form) const;
  /// Lagrange multiplier of constraint i; nonnegative for inequalities.
  double multiplier(int i) const;
  bool optimal() const { return status == SolveStatus::optimal; }
};

ConicSolution solve_sdp(const ConicProblem& problem, const SolverOptions& options = {});

/// Requires every psd block to have order 1. Uses the simplex method, so the
/// returned primal point is a vertex.
ConicSolution solve_lp(const ConicProblem& problem, const SolverOptions& options = {});

/// Text dump: "# constraint k relation rhs" headers followed by
/// "block row col value" lines; constraint -1 is the objective.
void write_sparse_dump(const ConicProblem& problem, std::ostream& out);

// ---------------------------------------------------------------------------
// Dense linear programs with variable bounds (used directly by the local
// search and the linear analysis).

struct LinearProgram {
  Sense sense = Sense::minimize;
  Vector c;
  Matrix a;
  std::vector<Relation> relations;
  Vector b;
  Vector lower;  // -inf allowed
  Vector upper;  // +inf allowed
};

struct LpResult {
  SolveStatus status = SolveStatus::numerical_failure;
  Vector x;
  double objective = 0.0;
  Vector sensitivity;  // d(objective)/d(b_i)
  Vector farkas;       // as in ConicSolution, over the rows of `a` (bounds folded in)
  int iterations = 0;
};

LpResult solve_linear_program(const LinearProgram& lp, int max_iter = 20000);

/// Builds a LinearProgram with `n` variables bounded by [lower, upper] and no rows.
LinearProgram make_lp(int n, Sense sense = Sense::minimize);
void add_row(LinearProgram& lp, const Vector& row, Relation relation, double rhs);

}  // namespace consist::conic

#endif  // CONSIST_CONIC_HPP
