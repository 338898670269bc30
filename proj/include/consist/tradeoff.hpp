#ifndef CONSIST_TRADEOFF_HPP
#define CONSIST_TRADEOFF_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "consist/vector.hpp"

namespace consist {

struct TradeoffPoint {
  double r1 = 0.0;
  double r2 = 0.0;
  double d1 = 0.0;  // relaxations from the local search
  double d2 = 0.0;
  double eff1 = 0.0;  // effective expansions r * d
  double eff2 = 0.0;
  double rvcm = 0.0;
  bool feasible = false;  // local search found relaxations restoring consistency
  bool sdp_ok = false;
  std::string error;
  Vector x_witness;
};

/// {(y1, y2) >= 0 : y1/r1 + y2/r2 < rvcm}; a zero coefficient pins that axis to 0.
struct InfeasibleHalfPlane {
  double r1 = 0.0;
  double r2 = 0.0;
  double rvcm = 0.0;
  bool contains(double y1, double y2, double tol = 1e-6) const;
};

struct TradeoffScan {
  BoundRef first;
  BoundRef second;
  std::vector<TradeoffPoint> points;
  std::vector<InfeasibleHalfPlane> region;
  bool certified_infeasible(double y1, double y2, double tol = 1e-6) const;
};

/// Null everywhere except the two bounds of the pair.
RelaxationScheme pair_scheme(const Dataset& dataset, const BoundRef& first, const BoundRef& second,
                             double r1, double r2);

TradeoffPoint tradeoff_point(const Dataset& dataset, const BoundRef& first, const BoundRef& second,
                             double r1, double r2, const VcmOptions& options = {});

/// The two axes plus n_samples directions (cos t, sin t) with t ~ U(0, pi/2), sorted by t.
TradeoffScan tradeoff_scan(const Dataset& dataset, const BoundRef& first, const BoundRef& second,
                           int n_samples = 64, std::uint64_t seed = 0,
                           const VcmOptions& options = {});

/// Along feasible points sorted by eff1, eff2 never increases (within tol).
bool frontier_monotone(const std::vector<TradeoffPoint>& points, double tol = 1e-6);

}  // namespace consist

#endif  // CONSIST_TRADEOFF_HPP
