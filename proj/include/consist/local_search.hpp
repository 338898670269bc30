#ifndef CONSIST_LOCAL_SEARCH_HPP
#define CONSIST_LOCAL_SEARCH_HPP

#include <cstdint>
#include <vector>

#include "consist/constraint_system.hpp"

namespace consist {

struct LocalOptions {
  int starts = 30;
  std::uint64_t seed = 0;
  int max_iter = 300;
  /// Tried before the Latin hypercube starts, in order.
  std::vector<Vector> extra_starts;
};

struct LocalOutcome {
  bool feasible = false;  // some start ended with the hard rows satisfied
  double value = 0.0;
  Vector x;
  int start_index = -1;     // start that produced x
  int feasible_starts = 0;
  bool single_basin = false;  // every feasible start ended at the same point
};

/**
 * Sequential linear programming with a trust region. Each step solves an LP
 * built from first-order models of the rows; steps are accepted on the exact
 * merit function. Hard rows enter through an elastic penalty.
 *
 * maximize_tightening: maximize min_k -f_k(x)/w_k over rows with weight > 0,
 * subject to the remaining non-box rows and the box [lower, upper].
 */
LocalOutcome maximize_tightening(const ConstraintSystem& system, const LocalOptions& options);

/**
 * minimize_relaxation: minimize sum_k max(0, f_k(x))/c_k over rows with
 * coefficient c_k > 0; rows with coefficient 0 are hard, box sides with
 * coefficient 0 are simple bounds.
 */
LocalOutcome minimize_relaxation(const ConstraintSystem& system, const LocalOptions& options);

/// Latin hypercube points in the start box (infinite sides replaced by a width-2 range).
std::vector<Vector> latin_hypercube(const Vector& lower, const Vector& upper, int count,
                                    std::uint64_t seed);

}  // namespace consist

#endif  // CONSIST_LOCAL_SEARCH_HPP
