#include <cmath>
#include <ostream>

#include "consist/conic.hpp"

namespace consist::conic {

LinearForm& LinearForm::add(int block, int row, int col, double value) {
  if (value != 0.0) entries_.push_back({block, row, col, value});
  return *this;
}

LinearForm& LinearForm::add_matrix(int block, int offset, const Matrix& m, double scale) {
  for (int j = 0; j < m.cols(); ++j) {
    for (int i = 0; i <= j; ++i) {
      const double v = i == j ? m(i, j) : m(i, j) + m(j, i);
      add(block, offset + i, offset + j, scale * v);
    }
  }
  return *this;
}

int ConicProblem::add_block(BlockKind kind, int size) {
  if (size < 1) throw DimensionError("block size must be positive");
  blocks_.push_back({kind, size});
  return static_cast<int>(blocks_.size()) - 1;
}

int ConicProblem::add_constraint(LinearForm form, Relation relation, double rhs,
                                 std::string label) {
  constraints_.push_back({std::move(form), relation, rhs, std::move(label)});
  return static_cast<int>(constraints_.size()) - 1;
}

void ConicProblem::set_objective(Sense sense, LinearForm form) {
  sense_ = sense;
  objective_ = std::move(form);
}

void ConicProblem::validate() const {
  auto check = [&](const LinearForm& f, const std::string& where) {
    for (const auto& e : f.entries()) {
      if (e.block < 0 || e.block >= static_cast<int>(blocks_.size())) {
        throw DimensionError(where + ": block " + std::to_string(e.block) + " out of range");
      }
      const Block& b = blocks_[e.block];
      const bool vec = b.kind != BlockKind::psd;
      if (e.row < 0 || e.row >= b.size || e.col < 0 || (vec ? e.col != 0 : e.col >= b.size)) {
        throw DimensionError(where + ": entry (" + std::to_string(e.row) + ", " +
                             std::to_string(e.col) + ") out of range for block " +
                             std::to_string(e.block));
      }
      if (!std::isfinite(e.value)) throw Error(where + ": non-finite coefficient");
    }
  };
  check(objective_, "objective");
  for (std::size_t i = 0; i < constraints_.size(); ++i) {
    check(constraints_[i].form, "constraint " + std::to_string(i));
    if (!std::isfinite(constraints_[i].rhs)) {
      throw Error("constraint " + std::to_string(i) + ": non-finite right-hand side");
    }
  }
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::primal_infeasible: return "primal_infeasible";
    case SolveStatus::dual_infeasible: return "dual_infeasible";
    case SolveStatus::max_iter: return "max_iter";
    case SolveStatus::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

double ConicSolution::value(const LinearForm& form) const {
  double v = 0.0;
  for (const auto& e : form.entries()) v += e.value * blocks.at(e.block)(e.row, e.col);
  return v;
}

double ConicSolution::multiplier(int i) const {
  const double s = sensitivity(i);
  const Relation r = relations.at(i);
  if (r == Relation::equal) return s;
  // Relaxing a <= row raises its rhs; relaxing a >= row lowers it.
  const double relax = r == Relation::less_equal ? 1.0 : -1.0;
  const double improve = sense == Sense::maximize ? 1.0 : -1.0;
  return relax * improve * s;
}

void write_sparse_dump(const ConicProblem& problem, std::ostream& out) {
  out.precision(17);
  out << "# blocks";
  for (const auto& b : problem.blocks()) {
    const char* kind = b.kind == BlockKind::psd ? "psd" : b.kind == BlockKind::nonnegative ? "nonneg" : "free";
    out << ' ' << kind << ':' << b.size;
  }
  out << '\n';
  out << "# constraint -1 " << (problem.sense() == Sense::minimize ? "minimize" : "maximize")
      << '\n';
  for (const auto& e : problem.objective().entries()) {
    out << e.block << ' ' << e.row << ' ' << e.col << ' ' << e.value << '\n';
  }
  for (std::size_t i = 0; i < problem.constraints().size(); ++i) {
    const auto& c = problem.constraints()[i];
    const char* rel = c.relation == Relation::equal ? "==" : c.relation == Relation::less_equal ? "<=" : ">=";
    out << "# constraint " << i << ' ' << rel << ' ' << c.rhs << '\n';
    for (const auto& e : c.form.entries()) {
      out << e.block << ' ' << e.row << ' ' << e.col << ' ' << e.value << '\n';
    }
  }
}

}  // namespace consist::conic
