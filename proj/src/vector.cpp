#include "consist/vector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "products.hpp"

namespace consist {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vector& slot(VcmResult& res, BoundKind kind) {
  switch (kind) {
    case BoundKind::qoi_upper: return res.delta_U;
    case BoundKind::qoi_lower: return res.delta_L;
    case BoundKind::param_upper: return res.delta_u;
    case BoundKind::param_lower: return res.delta_l;
    case BoundKind::facet: return res.delta_facet;
  }
  return res.delta_facet;
}

double bound_width(const Dataset& d, const BoundRef& ref) {
  switch (ref.kind) {
    case BoundKind::qoi_upper:
    case BoundKind::qoi_lower: return d.qois[ref.index].upper - d.qois[ref.index].lower;
    case BoundKind::param_upper:
    case BoundKind::param_lower: {
      const double w = d.box.upper(ref.index) - d.box.lower(ref.index);
      return std::isfinite(w) ? w : 1.0;
    }
    case BoundKind::facet: return 1.0;
  }
  return 1.0;
}

VcmResult empty_result(const Dataset& d, const RelaxationScheme& scheme) {
  VcmResult res;
  res.scheme = scheme;
  res.delta_L = Vector::Zero(d.N());
  res.delta_U = Vector::Zero(d.N());
  res.delta_l = Vector::Zero(d.n());
  res.delta_u = Vector::Zero(d.n());
  res.delta_facet = Vector::Zero(d.m());
  return res;
}

}  // namespace

double VcmResult::relaxation(const BoundRef& ref) const {
  return slot(const_cast<VcmResult&>(*this), ref.kind)(ref.index);
}

PerturbationVector VcmResult::expansions() const {
  PerturbationVector p;
  p.qoi_upper = scheme.qoi_upper.cwiseProduct(delta_U);
  p.qoi_lower = scheme.qoi_lower.cwiseProduct(delta_L);
  p.param_upper = scheme.param_upper.cwiseProduct(delta_u);
  p.param_lower = scheme.param_lower.cwiseProduct(delta_l);
  p.facet = scheme.facet.cwiseProduct(delta_facet);
  return p;
}

Vector VcmResult::signed_qoi_view() const {
  return scheme.qoi_upper.cwiseProduct(delta_U) - scheme.qoi_lower.cwiseProduct(delta_L);
}

bool VcmResult::relaxes_parameters(double tol) const {
  return (delta_l.size() && delta_l.maxCoeff() > tol) || (delta_u.size() && delta_u.maxCoeff() > tol);
}

VcmResult vcm_local(const Dataset& dataset, const RelaxationScheme& scheme,
                    const LocalOptions& options) {
  const ConstraintSystem sys = make_system(dataset, &scheme);
  const LocalOutcome lo = minimize_relaxation(sys, options);
  if (!lo.feasible) {
    throw NullCoefficientInfeasible(
        "no feasible parameter vector under the null-coefficient bounds");
  }
  VcmResult res = empty_result(dataset, scheme);
  res.x_witness = lo.x;
  res.single_basin = lo.single_basin;
  double total = 0.0;
  for (const auto& r : sys.rows) {
    if (r.coefficient <= 0.0) continue;
    const double delta = std::max(0.0, r.value(lo.x)) / r.coefficient;
    slot(res, r.ref.kind)(r.ref.index) = delta;
    total += delta;
  }
  res.value_upper = total;
  return res;
}

VcmSdp vcm_sdp_lower(const Dataset& dataset, const RelaxationScheme& scheme,
                     const SdpOptions& options) {
  using namespace conic;
  const ConstraintSystem sys = make_system(dataset, &scheme);
  const int n = sys.n;

  // Relaxation variables of linear rows live in the psd block; those of QOI
  // rows only appear linearly and go to a nonnegative block.
  int relaxed_linear = 0;
  int relaxed_qoi = 0;
  for (const auto& r : sys.rows) {
    if (r.coefficient <= 0.0) continue;
    if (r.weight == 0.0) ++relaxed_linear; else ++relaxed_qoi;
  }
  const int order = 1 + n + relaxed_linear;
  ConicProblem p;
  const int y = p.add_block(BlockKind::psd, order);
  const int dq = relaxed_qoi > 0 ? p.add_block(BlockKind::nonnegative, relaxed_qoi) : -1;

  LinearForm obj;
  std::vector<Vector> lifted;  // linear rows in the [1; x; delta] coordinates
  int next_lin = 0, next_qoi = 0;
  for (const auto& r : sys.rows) {
    LinearForm f;
    if (r.weight == 0.0) {
      Vector c = Vector::Zero(order);
      c.head(n + 1) = r.a;
      if (r.coefficient > 0.0) {
        const int idx = 1 + n + next_lin++;
        c(idx) = -r.coefficient;
        obj.add(y, idx, 0, 1.0);
        LinearForm sign;
        sign.add(y, idx, 0, 1.0);
        p.add_constraint(std::move(sign), Relation::greater_equal, 0.0);
      }
      for (int i = 0; i < order; ++i) f.add(y, i, 0, c(i));
      lifted.push_back(std::move(c));
    } else {
      f.add_matrix(y, 0, r.g);
      if (r.coefficient > 0.0) {
        const int idx = next_qoi++;
        f.add(dq, idx, -r.coefficient);
        obj.add(dq, idx, 1.0);
      }
    }
    p.add_constraint(std::move(f), Relation::less_equal, 0.0);
  }
  VcmSdp out;
  out.order = order;
  for (const auto& [i, j] : detail::product_pairs(static_cast<int>(lifted.size()), options)) {
    const Matrix prod = 0.5 * (lifted[i] * lifted[j].transpose() + lifted[j] * lifted[i].transpose());
    LinearForm f;
    f.add_matrix(y, 0, prod);
    p.add_constraint(std::move(f), Relation::greater_equal, 0.0);
    ++out.product_constraints;
  }
  LinearForm one;
  one.add(y, 0, 0, 1.0);
  p.add_constraint(std::move(one), Relation::equal, 1.0);
  p.set_objective(Sense::minimize, obj);

  out.solution = solve_sdp(p, options.solver);
  out.value_lower = out.solution.optimal() ? std::max(0.0, out.solution.primal_objective) : 0.0;
  return out;
}

VcmResult vcm(const Dataset& dataset, const RelaxationScheme& scheme, const VcmOptions& options) {
  VcmResult res = vcm_local(dataset, scheme, options.local);
  const VcmSdp sdp = vcm_sdp_lower(dataset, scheme, options.sdp);
  res.sdp_status = sdp.solution.status;
  res.has_lower = sdp.ok();
  res.value_lower = sdp.value_lower;
  return res;
}

Dataset apply_relaxations(const Dataset& dataset, const VcmResult& result) {
  Dataset out = dataset;
  const PerturbationVector e = result.expansions();
  const bool witness = result.x_witness.size() == dataset.n();
  for (int q = 0; q < dataset.N(); ++q) {
    auto& c = out.qois[q];
    c.upper += e.qoi_upper(q);
    c.lower -= e.qoi_lower(q);
    if (witness) {
      // Guards against rounding on bounds met with equality at the witness.
      const double m = evaluate_quadratic(c.model, result.x_witness);
      if (e.qoi_upper(q) > 0.0) c.upper = std::max(c.upper, m);
      if (e.qoi_lower(q) > 0.0) c.lower = std::min(c.lower, m);
    }
  }
  for (int i = 0; i < dataset.n(); ++i) {
    out.box.upper(i) += e.param_upper(i);
    out.box.lower(i) -= e.param_lower(i);
    if (witness) {
      if (e.param_upper(i) > 0.0) out.box.upper(i) = std::max(out.box.upper(i), result.x_witness(i));
      if (e.param_lower(i) > 0.0) out.box.lower(i) = std::min(out.box.lower(i), result.x_witness(i));
    }
  }
  for (int k = 0; k < dataset.m(); ++k) {
    out.facets[k](0) -= e.facet(k);
    if (witness && e.facet(k) > 0.0) {
      out.facets[k](0) = std::min(out.facets[k](0), -out.facets[k].tail(dataset.n()).dot(result.x_witness));
    }
  }
  return out;
}

std::vector<StructureFinding> check_structure(const Dataset& dataset, const VcmResult& result,
                                              double tol) {
  std::vector<StructureFinding> out;
  for (int q = 0; q < dataset.N(); ++q) {
    if (std::min(result.delta_L(q), result.delta_U(q)) > tol) {
      out.push_back({"both_sides_relaxed", {BoundKind::qoi_upper, q},
                     "both bounds of QOI '" + dataset.qois[q].name + "' are relaxed"});
    }
  }
  for (int i = 0; i < dataset.n(); ++i) {
    if (std::min(result.delta_l(i), result.delta_u(i)) > tol) {
      out.push_back({"both_sides_relaxed", {BoundKind::param_upper, i},
                     "both bounds of parameter '" + dataset.parameter_names[i] + "' are relaxed"});
    }
  }
  if (result.x_witness.size() != dataset.n()) return out;
  const ConstraintSystem sys = make_system(dataset, &result.scheme);
  for (const auto& r : sys.rows) {
    const double delta = result.relaxation(r.ref);
    if (delta <= tol) continue;
    const double f = r.value(result.x_witness);
    const double moved = r.coefficient * delta;
    if (std::abs(f - moved) > tol * (1.0 + std::abs(moved))) {
      out.push_back({"relaxed_bound_slack", r.ref,
                     to_string(r.ref.kind) + " of '" + bound_name(dataset, r.ref) +
                         "' is relaxed but not met with equality at the witness"});
    }
  }
  return out;
}

bool relaxation_nonzero(const Dataset& dataset, const VcmResult& result, const BoundRef& ref) {
  const double moved = scheme_coefficient(result.scheme, ref) * result.relaxation(ref);
  return moved > 1e-6 * std::max(1.0, bound_width(dataset, ref));
}

}  // namespace consist
