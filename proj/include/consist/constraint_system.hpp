#ifndef CONSIST_CONSTRAINT_SYSTEM_HPP
#define CONSIST_CONSTRAINT_SYSTEM_HPP

#include <string>
#include <vector>

#include "consist/dataset.hpp"

namespace consist {

enum class BoundKind { qoi_upper, qoi_lower, param_upper, param_lower, facet };

std::string to_string(BoundKind kind);
BoundKind parse_bound_kind(const std::string& text);

/// Identifies one bound of a dataset: a QOI side, a parameter side or an extra facet.
struct BoundRef {
  BoundKind kind = BoundKind::qoi_upper;
  int index = 0;

  friend bool operator==(const BoundRef&, const BoundRef&) = default;
  friend auto operator<=>(const BoundRef&, const BoundRef&) = default;
};

std::string bound_name(const Dataset& dataset, const BoundRef& ref);

/// Parses "kind:name" (e.g. "qoi_lower:Q37", "param_upper:x14", "facet:0").
BoundRef parse_bound_ref(const Dataset& dataset, const std::string& text);

/// Every bound that exists in the dataset, in canonical order
/// (QOI upper, QOI lower, parameter upper, parameter lower, facets).
/// Infinite parameter bounds are skipped.
std::vector<BoundRef> all_bounds(const Dataset& dataset);

double scheme_coefficient(const RelaxationScheme& scheme, const BoundRef& ref);
void set_scheme_coefficient(RelaxationScheme& scheme, const BoundRef& ref, double value);

/**
 * One inequality z' G z <= 0 in the lifted variable z = [1; x].
 *
 * `weight` is the uniform-tightening weight used by the scalar measure
 * ((U-L)/2 for QOI sides, 0 for box and facets). `width` is the interval
 * width used to scale sensitivities. `coefficient` is the relaxation
 * coefficient for the vector measure.
 */
struct SystemRow {
  BoundRef ref;
  Matrix g;
  bool linear = false;
  Vector a;  // linear rows: the facet vector, g = (e1 a' + a e1')/2
  double weight = 0.0;
  double width = 1.0;
  double coefficient = 0.0;

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
};

struct ConstraintSystem {
  int n = 0;
  std::vector<SystemRow> rows;
  Vector lower;  // box (may be infinite)
  Vector upper;

  bool all_linear() const;
};

/**
 * Builds the row representation of a dataset. Bounds are shifted by `rho`
 * (positive relaxes) while the tightening weights keep the original widths.
 * With a scheme, every row carries its relaxation coefficient.
 */
ConstraintSystem make_system(const Dataset& dataset, const RelaxationScheme* scheme = nullptr,
                             const PerturbationVector* rho = nullptr);

/// Facet row a'[1;x] <= 0 for the upper (x_i <= u) or lower (x_i >= l) side of parameter i.
Vector box_facet(int n, int i, bool upper, double bound);

}  // namespace consist

#endif  // CONSIST_CONSTRAINT_SYSTEM_HPP
