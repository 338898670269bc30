#include "consist/constraint_system.hpp"

#include <cmath>

namespace consist {

std::string to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::qoi_upper: return "qoi_upper";
    case BoundKind::qoi_lower: return "qoi_lower";
    case BoundKind::param_upper: return "param_upper";
    case BoundKind::param_lower: return "param_lower";
    case BoundKind::facet: return "facet";
  }
  return "unknown";
}

BoundKind parse_bound_kind(const std::string& text) {
  for (BoundKind k : {BoundKind::qoi_upper, BoundKind::qoi_lower, BoundKind::param_upper,
                      BoundKind::param_lower, BoundKind::facet}) {
    if (to_string(k) == text) return k;
  }
  throw Error("unknown bound kind '" + text + "'");
}

std::string bound_name(const Dataset& dataset, const BoundRef& ref) {
  switch (ref.kind) {
    case BoundKind::qoi_upper:
    case BoundKind::qoi_lower: return dataset.qois.at(ref.index).name;
    case BoundKind::param_upper:
    case BoundKind::param_lower: return dataset.parameter_names.at(ref.index);
    case BoundKind::facet: return std::to_string(ref.index);
  }
  return {};
}

BoundRef parse_bound_ref(const Dataset& dataset, const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw Error("bound reference '" + text + "' must look like kind:name");
  }
  BoundRef ref;
  ref.kind = parse_bound_kind(text.substr(0, colon));
  const std::string name = text.substr(colon + 1);
  switch (ref.kind) {
    case BoundKind::qoi_upper:
    case BoundKind::qoi_lower: ref.index = dataset.qoi_index(name); break;
    case BoundKind::param_upper:
    case BoundKind::param_lower: ref.index = dataset.parameter_index(name); break;
    case BoundKind::facet: {
      try {
        ref.index = std::stoi(name);
      } catch (const std::exception&) {
        ref.index = -1;
      }
      if (ref.index >= dataset.m()) ref.index = -1;
      break;
    }
  }
  if (ref.index < 0) throw Error("bound reference '" + text + "' names nothing in the dataset");
  return ref;
}

std::vector<BoundRef> all_bounds(const Dataset& dataset) {
  std::vector<BoundRef> out;
  for (int e = 0; e < dataset.N(); ++e) out.push_back({BoundKind::qoi_upper, e});
  for (int e = 0; e < dataset.N(); ++e) out.push_back({BoundKind::qoi_lower, e});
  for (int i = 0; i < dataset.n(); ++i) {
    if (std::isfinite(dataset.box.upper(i))) out.push_back({BoundKind::param_upper, i});
  }
  for (int i = 0; i < dataset.n(); ++i) {
    if (std::isfinite(dataset.box.lower(i))) out.push_back({BoundKind::param_lower, i});
  }
  for (int k = 0; k < dataset.m(); ++k) out.push_back({BoundKind::facet, k});
  return out;
}

namespace {

Vector& scheme_vector(RelaxationScheme& s, BoundKind kind) {
  switch (kind) {
    case BoundKind::qoi_upper: return s.qoi_upper;
    case BoundKind::qoi_lower: return s.qoi_lower;
    case BoundKind::param_upper: return s.param_upper;
    case BoundKind::param_lower: return s.param_lower;
    case BoundKind::facet: return s.facet;
  }
  return s.facet;
}

}  // namespace

double scheme_coefficient(const RelaxationScheme& scheme, const BoundRef& ref) {
  return scheme_vector(const_cast<RelaxationScheme&>(scheme), ref.kind)(ref.index);
}

void set_scheme_coefficient(RelaxationScheme& scheme, const BoundRef& ref, double value) {
  scheme_vector(scheme, ref.kind)(ref.index) = value;
}

double SystemRow::value(const Vector& x) const {
  if (linear) return a(0) + a.tail(x.size()).dot(x);
  Vector z(x.size() + 1);
  z(0) = 1.0;
  z.tail(x.size()) = x;
  return z.dot(g * z);
}

Vector SystemRow::gradient(const Vector& x) const {
  if (linear) return a.tail(x.size());
  Vector z(x.size() + 1);
  z(0) = 1.0;
  z.tail(x.size()) = x;
  return 2.0 * (g * z).tail(x.size());
}

bool ConstraintSystem::all_linear() const {
  for (const auto& r : rows) {
    if (!r.linear) return false;
  }
  return true;
}

Vector box_facet(int n, int i, bool upper, double bound) {
  Vector a = Vector::Zero(n + 1);
  if (upper) {
    a(0) = -bound;
    a(1 + i) = 1.0;
  } else {
    a(0) = bound;
    a(1 + i) = -1.0;
  }
  return a;
}

namespace {

SystemRow linear_row(BoundRef ref, Vector a) {
  SystemRow r;
  r.ref = ref;
  r.linear = true;
  const auto dim = a.size();
  r.g = Matrix::Zero(dim, dim);
  r.g.row(0) += 0.5 * a.transpose();
  r.g.col(0) += 0.5 * a;
  r.a = std::move(a);
  return r;
}

}  // namespace

ConstraintSystem make_system(const Dataset& d, const RelaxationScheme* scheme,
                             const PerturbationVector* rho) {
  if (scheme) check_scheme(d, *scheme);
  if (rho) check_perturbation(d, *rho);
  const int n = d.n();
  ConstraintSystem sys;
  sys.n = n;
  sys.lower = d.box.lower;
  sys.upper = d.box.upper;
  if (rho) {
    sys.lower -= rho->param_lower;
    sys.upper += rho->param_upper;
  }

  auto coefficient = [&](const BoundRef& ref) {
    return scheme ? scheme_coefficient(*scheme, ref) : 0.0;
  };

  for (int pass = 0; pass < 2; ++pass) {
    const bool upper = pass == 0;
    for (int e = 0; e < d.N(); ++e) {
      const auto& q = d.qois[e];
      const BoundRef ref{upper ? BoundKind::qoi_upper : BoundKind::qoi_lower, e};
      SystemRow r;
      r.ref = ref;
      r.width = q.upper - q.lower;
      r.weight = 0.5 * r.width;
      r.coefficient = coefficient(ref);
      if (upper) {
        const double bound = q.upper + (rho ? rho->qoi_upper(e) : 0.0);
        r.g = q.model.coeff();
        r.g(0, 0) -= bound;
      } else {
        const double bound = q.lower - (rho ? rho->qoi_lower(e) : 0.0);
        r.g = -q.model.coeff();
        r.g(0, 0) += bound;
      }
      r.linear = q.model.is_affine();
      if (r.linear) {
        r.a = Vector(n + 1);
        r.a(0) = r.g(0, 0);
        r.a.tail(n) = 2.0 * r.g.block(1, 0, n, 1);
      }
      sys.rows.push_back(std::move(r));
    }
  }
  for (int pass = 0; pass < 2; ++pass) {
    const bool upper = pass == 0;
    for (int i = 0; i < n; ++i) {
      const double bound = upper ? d.box.upper(i) : d.box.lower(i);
      if (!std::isfinite(bound)) continue;
      const BoundRef ref{upper ? BoundKind::param_upper : BoundKind::param_lower, i};
      const double shift = rho ? (upper ? rho->param_upper(i) : -rho->param_lower(i)) : 0.0;
      SystemRow r = linear_row(ref, box_facet(n, i, upper, bound + shift));
      const double width = d.box.upper(i) - d.box.lower(i);
      r.width = std::isfinite(width) ? width : 1.0;
      r.coefficient = coefficient(ref);
      sys.rows.push_back(std::move(r));
    }
  }
  for (int k = 0; k < d.m(); ++k) {
    const BoundRef ref{BoundKind::facet, k};
    Vector a = d.facets[k];
    if (rho) a(0) -= rho->facet(k);
    SystemRow r = linear_row(ref, std::move(a));
    r.coefficient = coefficient(ref);
    sys.rows.push_back(std::move(r));
  }
  return sys;
}

}  // namespace consist
