#ifndef CONSIST_VECTOR_HPP
#define CONSIST_VECTOR_HPP

#include <string>
#include <vector>

#include "consist/scalar.hpp"

namespace consist {

/// No parameter vector satisfies the bounds that carry null coefficients.
class NullCoefficientInfeasible : public Error {
 public:
  using Error::Error;
};

struct VcmOptions {
  LocalOptions local;
  SdpOptions sdp;
};

struct VcmResult {
  double value_upper = 0.0;
  double value_lower = 0.0;
  // Relaxations in coefficient units; the bound moves by coefficient * relaxation.
  Vector delta_L;
  Vector delta_U;
  Vector delta_l;
  Vector delta_u;
  Vector delta_facet;
  Vector x_witness;
  RelaxationScheme scheme;
  bool single_basin = false;
  conic::SolveStatus sdp_status = conic::SolveStatus::optimal;
  bool has_lower = false;  // value_lower came from a solved relaxation

  double relaxation(const BoundRef& ref) const;
  /// coefficient * relaxation for every bound.
  PerturbationVector expansions() const;
  /// Signed single-variable view: R_U * delta_U - R_L * delta_L per QOI.
  Vector signed_qoi_view() const;
  bool relaxes_parameters(double tol = 0.0) const;
};

/// Local upper side. Throws NullCoefficientInfeasible when the hard rows cannot be met.
VcmResult vcm_local(const Dataset& dataset, const RelaxationScheme& scheme,
                    const LocalOptions& options = {});

struct VcmSdp {
  double value_lower = 0.0;
  conic::ConicSolution solution;
  int order = 0;  // order of the psd block
  int product_constraints = 0;
  bool ok() const { return solution.optimal(); }
};

/// Semidefinite lower bound. Relaxation variables of null coefficients are omitted.
VcmSdp vcm_sdp_lower(const Dataset& dataset, const RelaxationScheme& scheme,
                     const SdpOptions& options = {});

VcmResult vcm(const Dataset& dataset, const RelaxationScheme& scheme, const VcmOptions& options = {});

/// Expands each bound by coefficient * relaxation. The witness stays feasible.
Dataset apply_relaxations(const Dataset& dataset, const VcmResult& result);

struct StructureFinding {
  std::string code;  // "both_sides_relaxed" or "relaxed_bound_slack"
  BoundRef ref;
  std::string message;
};

/// Checks the single-bound and equality properties of a local optimum.
std::vector<StructureFinding> check_structure(const Dataset& dataset, const VcmResult& result,
                                              double tol = 1e-8);

/// True when the relaxation of `ref` counts as nonzero for reports.
bool relaxation_nonzero(const Dataset& dataset, const VcmResult& result, const BoundRef& ref);

struct ExactSupport {
  int min_size = -1;  // -1: no support up to max_support
  std::vector<std::vector<BoundRef>> supports;
  bool exact = false;        // minimality certified (always for linear systems)
  bool lower_certified = false;
  long long subsets_checked = 0;
};

/// Smallest set of bounds whose free relaxation restores consistency.
ExactSupport vcm_exact_support(const Dataset& dataset, const RelaxationScheme& scheme,
                               int max_support, const VcmOptions& options = {});

/**
 * Same question for a linear system Ax <= b: the smallest set of rows with
 * r_i > 0 whose removal leaves the system feasible.
 */
ExactSupport exact_support_linear(const Matrix& a, const Vector& b, const Vector& r, int max_support);

/// Enumeration guard: throws Error when C(total, max_support) exceeds 1e6.
void check_enumeration_budget(int total, int max_support);

}  // namespace consist

#endif  // CONSIST_VECTOR_HPP
