#include "consist/tradeoff.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "consist/parallel.hpp"

namespace consist {

bool InfeasibleHalfPlane::contains(double y1, double y2, double tol) const {
  if (y1 < -tol || y2 < -tol) return false;
  double sum = 0.0;
  if (r1 > 0.0) sum += y1 / r1; else if (y1 > tol) return false;
  if (r2 > 0.0) sum += y2 / r2; else if (y2 > tol) return false;
  return sum < rvcm - tol;
}

bool TradeoffScan::certified_infeasible(double y1, double y2, double tol) const {
  return std::any_of(region.begin(), region.end(),
                     [&](const InfeasibleHalfPlane& h) { return h.contains(y1, y2, tol); });
}

RelaxationScheme pair_scheme(const Dataset& dataset, const BoundRef& first, const BoundRef& second,
                             double r1, double r2) {
  if (first == second) throw Error("trade-off scan needs two distinct bounds");
  RelaxationScheme s = build_scheme(dataset, SchemeKind::null, SchemeKind::null);
  set_scheme_coefficient(s, first, r1);
  set_scheme_coefficient(s, second, r2);
  return s;
}

TradeoffPoint tradeoff_point(const Dataset& dataset, const BoundRef& first, const BoundRef& second,
                             double r1, double r2, const VcmOptions& options) {
  TradeoffPoint pt;
  pt.r1 = r1;
  pt.r2 = r2;
  const RelaxationScheme scheme = pair_scheme(dataset, first, second, r1, r2);
  try {
    const VcmResult res = vcm_local(dataset, scheme, options.local);
    pt.d1 = res.relaxation(first);
    pt.d2 = res.relaxation(second);
    pt.eff1 = r1 * pt.d1;
    pt.eff2 = r2 * pt.d2;
    pt.x_witness = res.x_witness;
    pt.feasible = true;
  } catch (const NullCoefficientInfeasible& e) {
    pt.error = e.what();
  }
  try {
    const VcmSdp sdp = vcm_sdp_lower(dataset, scheme, options.sdp);
    pt.sdp_ok = sdp.ok();
    pt.rvcm = sdp.value_lower;
    if (!pt.sdp_ok && pt.error.empty()) {
      pt.error = "relaxation: " + conic::to_string(sdp.solution.status);
    }
  } catch (const Error& e) {
    if (pt.error.empty()) pt.error = e.what();
  }
  return pt;
}

TradeoffScan tradeoff_scan(const Dataset& dataset, const BoundRef& first, const BoundRef& second,
                           int n_samples, std::uint64_t seed, const VcmOptions& options) {
  // Validates the pair once up front.
  pair_scheme(dataset, first, second, 1.0, 1.0);
  std::mt19937_64 rng(mix_seed(seed, 3));
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi / 2.0);
  std::vector<double> thetas;
  for (int k = 0; k < n_samples; ++k) thetas.push_back(angle(rng));
  std::sort(thetas.begin(), thetas.end());
  std::vector<std::pair<double, double>> dirs = {{1.0, 0.0}};
  for (double t : thetas) dirs.emplace_back(std::cos(t), std::sin(t));
  dirs.emplace_back(0.0, 1.0);

  TradeoffScan scan;
  scan.first = first;
  scan.second = second;
  scan.points.resize(dirs.size());
  parallel_for(static_cast<int>(dirs.size()), [&](int k) {
    scan.points[k] = tradeoff_point(dataset, first, second, dirs[k].first, dirs[k].second, options);
  });
  // Bounds at solver noise level certify nothing.
  for (const auto& p : scan.points) {
    if (p.sdp_ok && p.rvcm > 1e-7) scan.region.push_back({p.r1, p.r2, p.rvcm});
  }
  return scan;
}

bool frontier_monotone(const std::vector<TradeoffPoint>& points, double tol) {
  std::vector<const TradeoffPoint*> f;
  for (const auto& p : points) {
    if (p.feasible) f.push_back(&p);
  }
  std::sort(f.begin(), f.end(), [](const TradeoffPoint* a, const TradeoffPoint* b) {
    return a->eff1 != b->eff1 ? a->eff1 < b->eff1 : a->eff2 > b->eff2;
  });
  for (std::size_t k = 1; k < f.size(); ++k) {
    if (f[k]->eff2 > f[k - 1]->eff2 + tol) return false;
  }
  return true;
}

}  // namespace consist
