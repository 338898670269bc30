#ifndef CONSIST_SCALAR_HPP
#define CONSIST_SCALAR_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "consist/conic.hpp"
#include "consist/constraint_system.hpp"
#include "consist/local_search.hpp"

namespace consist {

/// Controls the semidefinite relaxations shared by the scalar and vector measures.
struct SdpOptions {
  conic::SolverOptions solver;
  bool products = true;      // add pairwise products of linear rows
  int all_pairs_limit = 40;  // all pairs when the linear row count is at most this
  int random_pairs = 400;    // otherwise the diagonal plus this many random pairs
  std::uint64_t seed = 0;
};

struct ScmOptions {
  LocalOptions local;
  SdpOptions sdp;
};

/// Which constraint of an assembled relaxation belongs to which dataset bound.
struct BoundConstraint {
  BoundRef ref;
  int constraint = 0;
  double width = 1.0;
};

struct ScmSdp {
  double gamma_upper = 0.0;  // +inf when the solve gave no bound
  conic::ConicSolution solution;
  std::vector<BoundConstraint> bounds;
  int product_constraints = 0;
  bool ok() const { return solution.optimal(); }
};

struct ScmResult {
  double gamma_lower = 0.0;
  Vector x_witness;
  bool local_feasible = false;
  bool single_basin = false;
  double gamma_upper = 0.0;
  ScmSdp sdp;
};

/// Best uniform tightening found by multi-start local search.
ScmResult scm_local(const Dataset& dataset, const LocalOptions& options = {});

/// Semidefinite upper bound on the scalar measure.
ScmSdp scm_sdp_upper(const Dataset& dataset, const SdpOptions& options = {});

/// Same relaxation for an arbitrary row system (rows with weight > 0 are tightened).
ScmSdp scm_sdp_system(const ConstraintSystem& system, const SdpOptions& options = {});

/// Both sides.
ScmResult scm(const Dataset& dataset, const ScmOptions& options = {});

/// Both sides with bounds shifted by rho; the tightening keeps the original widths.
ScmResult scm_perturbed(const Dataset& dataset, const PerturbationVector& rho,
                        const ScmOptions& options = {});

struct SensitivityItem {
  BoundRef ref;
  std::string name;
  double value = 0.0;
};

struct SensitivityReport {
  std::vector<SensitivityItem> items;  // canonical bound order
  std::vector<int> ranking;            // indices into items, descending value
  const SensitivityItem* find(const BoundRef& ref) const;
};

/**
 * Multipliers of the bound rows scaled by the bound widths: QOI sides by
 * U - L, parameter sides by u - l, extra facets unscaled. Throws Error when
 * the relaxation was not solved to optimality.
 */
SensitivityReport sensitivities(const Dataset& dataset, const ScmSdp& sdp);

struct RemovalStrategy {
  enum class Kind { top_k, all_nonzero, nth };
  Kind kind = Kind::top_k;
  int k = 1;
  double threshold = 1e-6;  // relative to the largest sensitivity
};

struct IterationRound {
  std::vector<std::string> qois;  // QOIs present in this round
  double gamma_lower = 0.0;
  double gamma_upper = 0.0;
  std::vector<std::string> removed;
  std::vector<double> removed_sensitivity;
};

struct IterationTrace {
  std::vector<IterationRound> rounds;
  std::vector<std::string> removed;  // in removal order
  bool consistent = false;
};

/// Per-QOI score used for removal: the larger of its two side sensitivities.
std::vector<double> qoi_scores(const Dataset& dataset, const SensitivityReport& report);

/// Indices of the QOIs a strategy removes, given per-QOI scores.
std::vector<int> select_removals(const std::vector<double>& scores, const RemovalStrategy& strategy);

IterationTrace iterative_scm(const Dataset& dataset, const RemovalStrategy& strategy,
                             int max_rounds, const ScmOptions& options = {});

/// Copy of the dataset without the named QOIs.
Dataset remove_qois(const Dataset& dataset, const std::vector<std::string>& names);

}  // namespace consist

#endif  // CONSIST_SCALAR_HPP
