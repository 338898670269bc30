#include <filesystem>
#include <random>

#include "doctest.h"

#include "consist/constraint_system.hpp"
#include "consist/dataset.hpp"

using namespace consist;

namespace {

Dataset two_qoi() {
  Dataset d;
  d.parameter_names = {"x"};
  d.box.lower = Vector::Constant(1, -1.0);
  d.box.upper = Vector::Constant(1, 1.0);
  d.qois.push_back({"A", QuadraticModel::linear(0.0, Vector::Ones(1)), 1.0, 3.0});
  d.qois.push_back({"B", QuadraticModel::linear(0.0, Vector::Ones(1)), -2.0, 4.0});
  return d;
}

}  // namespace

TEST_CASE("quadratic evaluation") {
  CHECK(evaluate_quadratic(QuadraticModel(Matrix::Zero(3, 3)), Vector::Constant(2, 7.0)) == 0.0);

  const Dataset b = load_dataset(std::string(CONSIST_FIXTURES) + "/two_param.json");
  CHECK(evaluate_quadratic(b.qois[0].model, Vector::Zero(2)) == doctest::Approx(0.0881).epsilon(1e-15));

  Matrix sq = Matrix::Zero(2, 2);
  sq(1, 1) = 1.0;
  CHECK(evaluate_quadratic(QuadraticModel(sq), Vector::Constant(1, 2.0)) == 4.0);

  const auto m = QuadraticModel::from_parts(1.0, Vector::Constant(1, 2.0), Matrix::Constant(1, 1, 3.0));
  CHECK(evaluate_quadratic(m, Vector::Constant(1, 2.0)) == doctest::Approx(1.0 + 4.0 + 12.0));
  CHECK(gradient_quadratic(m, Vector::Constant(1, 2.0))(0) == doctest::Approx(2.0 + 12.0));
  CHECK_THROWS_AS(evaluate_quadratic(m, Vector::Zero(2)), DimensionError);
}

TEST_CASE("normalized slack") {
  Dataset d = two_qoi();
  d.qois.resize(1);
  d.qois[0].lower = 1.0;
  d.qois[0].upper = 2.0;
  CHECK(normalized_slack(d, Vector::Constant(1, 1.5))(0) == doctest::Approx(1.0));
  CHECK(normalized_slack(d, Vector::Constant(1, 2.0))(0) == doctest::Approx(0.0));
  CHECK(normalized_slack(d, Vector::Constant(1, 1.0))(0) == doctest::Approx(0.0));
  CHECK(normalized_slack(d, Vector::Constant(1, 2.5))(0) == doctest::Approx(-1.0));

  // Affine on each half of the interval; midpoint 1 and both ends 0 for random intervals.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int t = 0; t < 200; ++t) {
    const double a = u(rng), b = u(rng);
    if (std::abs(a - b) < 1e-3) continue;
    d.qois[0].lower = std::min(a, b);
    d.qois[0].upper = std::max(a, b);
    const double lo = d.qois[0].lower, hi = d.qois[0].upper, mid = 0.5 * (lo + hi);
    CHECK(normalized_slack(d, Vector::Constant(1, mid))(0) == doctest::Approx(1.0));
    CHECK(std::abs(normalized_slack(d, Vector::Constant(1, lo))(0)) < 1e-12);
    CHECK(std::abs(normalized_slack(d, Vector::Constant(1, hi))(0)) < 1e-12);
    const double q1 = lo + 0.25 * (hi - lo);
    CHECK(normalized_slack(d, Vector::Constant(1, q1))(0) == doctest::Approx(0.5));
  }
}

TEST_CASE("relaxation schemes") {
  const Dataset d = two_qoi();
  const auto unit = build_scheme(d, SchemeKind::unit, SchemeKind::unit);
  CHECK(unit.qoi_lower == Vector::Ones(2));
  CHECK(unit.qoi_upper == Vector::Ones(2));
  CHECK(unit.param_lower == Vector::Ones(1));
  CHECK(unit.param_upper == Vector::Ones(1));

  const auto interval = build_scheme(d, SchemeKind::interval, SchemeKind::interval);
  CHECK(interval.qoi_lower(0) == 2.0);
  CHECK(interval.qoi_upper(0) == 2.0);
  CHECK(interval.qoi_upper(1) == 6.0);
  CHECK(interval.param_upper(0) == 2.0);

  const auto bound = build_scheme(d, SchemeKind::bound, SchemeKind::bound);
  CHECK(bound.qoi_lower(0) == 1.0);
  CHECK(bound.qoi_upper(0) == 3.0);
  CHECK(bound.qoi_lower(1) == 2.0);

  const auto null = build_scheme(d, SchemeKind::null, SchemeKind::null);
  CHECK(null.qoi_lower.isZero());
  CHECK(null.qoi_upper.isZero());
  CHECK(null.param_lower.isZero());
  CHECK(null.param_upper.isZero());

  Dataset zero = d;
  zero.qois[0].lower = 0.0;
  CHECK_THROWS_AS(build_scheme(zero, SchemeKind::bound, SchemeKind::unit), Error);

  CHECK(parse_scheme_kind("interval") == SchemeKind::interval);
  CHECK_THROWS(parse_scheme_kind("other"));
}

TEST_CASE("infinite parameter sides get null coefficients") {
  const Dataset b = load_dataset(std::string(CONSIST_FIXTURES) + "/two_param.json");
  const auto s = build_scheme(b, SchemeKind::unit, SchemeKind::unit);
  CHECK(s.param_lower.isZero());
  CHECK(s.param_upper.isZero());
  CHECK(s.facet == Vector::Ones(2));
  CHECK(build_scheme(b, SchemeKind::null, SchemeKind::null).facet.isZero());
}

TEST_CASE("validation") {
  Dataset d = two_qoi();
  CHECK(validate_dataset(d).ok());

  Dataset degenerate = d;
  degenerate.qois[1].lower = degenerate.qois[1].upper;
  CHECK(validate_dataset(degenerate).has("degenerate_interval"));

  Dataset asym = d;
  Matrix c = asym.qois[0].model.coeff();
  c(0, 1) += 1e-3;
  asym.qois[0].model = QuadraticModel(c);
  CHECK(validate_dataset(asym).has("asymmetric_model"));

  Dataset dup = d;
  dup.qois[1].name = "A";
  CHECK(validate_dataset(dup).has("duplicate_qoi"));

  Dataset box = d;
  box.box.lower(0) = 2.0;
  CHECK(validate_dataset(box).has("empty_box"));
}

TEST_CASE("serialization") {
  const Dataset d = two_qoi();
  const auto path = std::filesystem::temp_directory_path() / "consist_roundtrip.json";
  save_dataset(d, path);
  const Dataset back = load_dataset(path);
  CHECK(back.parameter_names == d.parameter_names);
  CHECK(back.box.lower == d.box.lower);
  CHECK(back.box.upper == d.box.upper);
  REQUIRE(back.N() == d.N());
  for (int e = 0; e < d.N(); ++e) {
    CHECK(back.qois[e].name == d.qois[e].name);
    CHECK(back.qois[e].lower == d.qois[e].lower);
    CHECK(back.qois[e].upper == d.qois[e].upper);
    CHECK(back.qois[e].model.coeff() == d.qois[e].model.coeff());
  }
  std::filesystem::remove(path);

  const Dataset b = load_dataset(std::string(CONSIST_FIXTURES) + "/two_param.json");
  CHECK(b.n() == 2);
  CHECK(b.N() == 2);
  CHECK(b.m() == 2);
  CHECK(serialize_dataset(parse_dataset(serialize_dataset(b))) == serialize_dataset(b));
}

TEST_CASE("parse errors name the field") {
  try {
    load_dataset(std::string(CONSIST_FIXTURES) + "/malformed.json");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("upper") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_dataset("{"), ParseError);

  std::vector<std::string> warnings;
  const std::string asym = R"({"parameters":[{"name":"x","lower":-1,"upper":1}],
    "qois":[{"name":"q","lower":0,"upper":1,"coeff":[0,1,0.5,0]}]})";
  const Dataset d = parse_dataset(asym, &warnings);
  CHECK(warnings.size() == 1);
  CHECK(d.qois[0].model.coeff()(0, 1) == doctest::Approx(0.75));
}

TEST_CASE("bound references") {
  const Dataset d = two_qoi();
  const BoundRef r = parse_bound_ref(d, "qoi_lower:B");
  CHECK(r.kind == BoundKind::qoi_lower);
  CHECK(r.index == 1);
  CHECK(bound_name(d, r) == "B");
  CHECK(parse_bound_ref(d, "param_upper:x").kind == BoundKind::param_upper);
  CHECK_THROWS(parse_bound_ref(d, "qoi_lower:missing"));
  CHECK_THROWS(parse_bound_ref(d, "nonsense"));
  CHECK(all_bounds(d).size() == 6);
}

TEST_CASE("system rows encode the bounds") {
  const Dataset d = two_qoi();
  const ConstraintSystem sys = make_system(d);
  const Vector x = Vector::Constant(1, 0.5);
  for (const auto& row : sys.rows) {
    switch (row.ref.kind) {
      case BoundKind::qoi_upper: CHECK(row.value(x) == doctest::Approx(0.5 - d.qois[row.ref.index].upper)); break;
      case BoundKind::qoi_lower: CHECK(row.value(x) == doctest::Approx(d.qois[row.ref.index].lower - 0.5)); break;
      case BoundKind::param_upper: CHECK(row.value(x) == doctest::Approx(0.5 - 1.0)); break;
      case BoundKind::param_lower: CHECK(row.value(x) == doctest::Approx(-1.0 - 0.5)); break;
      case BoundKind::facet: break;
    }
  }
  PerturbationVector rho = PerturbationVector::zero(d);
  rho.qoi_upper(0) = 0.25;
  const ConstraintSystem shifted = make_system(d, nullptr, &rho);
  CHECK(shifted.rows[0].value(x) == doctest::Approx(sys.rows[0].value(x) - 0.25));
  CHECK(shifted.rows[0].weight == sys.rows[0].weight);
}
