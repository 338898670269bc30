#include "doctest.h"

#include "consist/tradeoff.hpp"

using namespace consist;

namespace {

Dataset fixture(const std::string& name) {
  return load_dataset(std::string(CONSIST_FIXTURES) + "/" + name + ".json");
}

const BoundRef kFirst{BoundKind::qoi_lower, 0};
const BoundRef kSecond{BoundKind::qoi_upper, 1};

}  // namespace

TEST_CASE("pair scheme") {
  const Dataset d = fixture("vcm_conflict_1d");
  const RelaxationScheme s = pair_scheme(d, kFirst, kSecond, 2.0, 1.0);
  CHECK(s.qoi_lower(0) == 2.0);
  CHECK(s.qoi_upper(1) == 1.0);
  CHECK(s.qoi_upper(0) == 0.0);
  CHECK(s.qoi_lower(1) == 0.0);
  CHECK(s.param_lower.isZero());
  CHECK(s.param_upper.isZero());
}

TEST_CASE("weighted pairs on the 1-D conflict") {
  const Dataset d = fixture("vcm_conflict_1d");
  const TradeoffPoint a = tradeoff_point(d, kFirst, kSecond, 2.0, 1.0);
  REQUIRE(a.feasible);
  CHECK(a.eff1 == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(a.eff2) < 1e-9);
  CHECK(a.d1 == doctest::Approx(0.5).epsilon(1e-9));

  const TradeoffPoint b = tradeoff_point(d, kFirst, kSecond, 1.0, 2.0);
  REQUIRE(b.feasible);
  CHECK(std::abs(b.eff1) < 1e-9);
  CHECK(b.eff2 == doctest::Approx(1.0).epsilon(1e-9));

  const TradeoffPoint axis = tradeoff_point(d, kFirst, kSecond, 1.0, 0.0);
  REQUIRE(axis.feasible);
  CHECK(axis.eff1 == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(axis.eff2 == 0.0);
}

TEST_CASE("consistent dataset") {
  const Dataset d = fixture("consistent_single");
  const TradeoffScan s = tradeoff_scan(d, {BoundKind::qoi_lower, 0}, {BoundKind::qoi_upper, 0}, 8, 1);
  CHECK(s.points.size() == 10);
  for (const auto& p : s.points) {
    CHECK(p.feasible);
    CHECK(p.eff1 == 0.0);
    CHECK(p.eff2 == 0.0);
  }
  CHECK(s.region.empty());
}

TEST_CASE("scan invariants on the 1-D conflict") {
  const Dataset d = fixture("vcm_conflict_1d");
  const TradeoffScan s = tradeoff_scan(d, kFirst, kSecond, 24, 3);
  REQUIRE(s.points.size() == 26);
  CHECK(s.points.front().r2 == 0.0);
  CHECK(s.points.back().r1 == 0.0);
  CHECK(!s.region.empty());
  for (const auto& p : s.points) {
    REQUIRE(p.feasible);
    CHECK(p.eff1 + p.eff2 == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(!s.certified_infeasible(p.eff1, p.eff2));

    VcmResult r;
    r.scheme = pair_scheme(d, kFirst, kSecond, p.r1, p.r2);
    r.delta_L = Vector::Zero(2);
    r.delta_U = Vector::Zero(2);
    r.delta_l = Vector::Zero(1);
    r.delta_u = Vector::Zero(1);
    r.delta_facet = Vector::Zero(0);
    r.delta_L(0) = p.d1;
    r.delta_U(1) = p.d2;
    r.x_witness = p.x_witness;
    CHECK(scm_local(apply_relaxations(d, r)).gamma_lower >= -1e-6);
  }
  CHECK(frontier_monotone(s.points));
  CHECK(s.certified_infeasible(0.2, 0.2));
  CHECK(!s.certified_infeasible(0.6, 0.6));
}

TEST_CASE("half-plane membership") {
  const InfeasibleHalfPlane h{1.0, 2.0, 0.5};
  CHECK(h.contains(0.1, 0.1));
  CHECK(!h.contains(0.5, 0.0));
  const InfeasibleHalfPlane axis{1.0, 0.0, 0.5};
  CHECK(axis.contains(0.2, 0.0));
  CHECK(!axis.contains(0.2, 0.1));
}

TEST_CASE("frontier monotonicity detects a violation") {
  std::vector<TradeoffPoint> pts(2);
  pts[0].feasible = pts[1].feasible = true;
  pts[0].eff1 = 0.0;
  pts[0].eff2 = 1.0;
  pts[1].eff1 = 1.0;
  pts[1].eff2 = 2.0;
  CHECK(!frontier_monotone(pts));
  pts[1].eff2 = 0.0;
  CHECK(frontier_monotone(pts));
}

TEST_CASE("scans are reproducible") {
  const Dataset d = fixture("vcm_conflict_1d");
  const TradeoffScan a = tradeoff_scan(d, kFirst, kSecond, 6, 9);
  const TradeoffScan b = tradeoff_scan(d, kFirst, kSecond, 6, 9);
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].r1 == b.points[i].r1);
    CHECK(a.points[i].eff1 == b.points[i].eff1);
    CHECK(a.points[i].rvcm == b.points[i].rvcm);
  }
}
