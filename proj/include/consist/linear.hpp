#ifndef CONSIST_LINEAR_HPP
#define CONSIST_LINEAR_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "consist/conic.hpp"

namespace consist {

struct LinearVcm {
  conic::SolveStatus status = conic::SolveStatus::numerical_failure;
  Vector delta;
  Vector x;
  double value = 0.0;
};

/// min ||delta||_1 s.t. A x <= b + diag(r) delta, delta >= 0, solved by the simplex method.
LinearVcm linear_vcm(const Matrix& a, const Vector& b, const Vector& r);

/// System A x <= b - alpha t of an instance.
struct TrialInstance {
  Matrix a;
  Vector b;
  Vector t;  // 0/1
  double alpha = 0.0;
  std::uint64_t seed = 0;
  Vector tightened_b() const { return b - alpha * t; }
};

/// The two-constraint example A = [1.5; -1], b = [1; 1], t = (1, 0).
/// `consistent` is set when alpha <= 2.5, where the tightened system stays feasible.
TrialInstance counterexample_instance(double alpha, bool* consistent = nullptr);

struct RatioPair {
  double phi_e = 0.0;
  double phi_delta = 0.0;
};

RatioPair phi_ratios(const Vector& delta, const Vector& t, double zero_tol = 1e-7);

struct AlphaPolicy {
  enum class Kind { fixed, threshold_factor };
  Kind kind = Kind::threshold_factor;
  double value = 1.5;  // alpha itself, or the factor applied to the threshold
};

struct TrialConfig {
  int m = 50;
  int n = 15;
  int n_errors = 1;
  int trials = 1000;
  AlphaPolicy alpha;
  std::uint64_t seed = 1;
  double slack_lo = 0.1;
  double slack_hi = 1.1;
  double zero_tol = 1e-7;
  int reseed_attempts = 10;
};

/**
 * Random instance: A ~ U[-1,1], b = A x0 + s with x0 ~ U[-1,1]^n and
 * s ~ U[slack_lo, slack_hi], t with n_errors ones. Returns false when no
 * inconsistent instance was found within the reseed budget.
 */
bool make_trial(std::uint64_t seed, const TrialConfig& config, TrialInstance& out);

/// Largest alpha keeping {x : A x <= b - alpha t} nonempty; +inf if unbounded.
double alpha_threshold(const Matrix& a, const Vector& b, const Vector& t);

bool system_feasible(const Matrix& a, const Vector& b);

struct TrialRow {
  int trial = 0;
  double phi_e = 0.0;
  double phi_delta = 0.0;
  double alpha = 0.0;
  bool skipped = false;
};

struct Histogram {
  std::vector<double> edges;  // bins + 1 entries
  std::vector<int> counts;
};

Histogram histogram(const std::vector<double>& values, int bins = 20);

struct TrialSummary {
  int trials = 0;
  int completed = 0;
  int skipped = 0;
  double fraction_perfect = 0.0;  // (phi_e, phi_delta) = (1, 1) among completed trials
  double median_phi_e = 0.0;
  double median_phi_delta = 0.0;
  double mean_phi_e = 0.0;
  double mean_phi_delta = 0.0;
};

struct TrialStats {
  std::vector<TrialRow> rows;
  Histogram phi_e;
  Histogram phi_delta;
  TrialSummary summary;
};

TrialStats run_trials(const TrialConfig& config);

double median(std::vector<double> values);

}  // namespace consist

#endif  // CONSIST_LINEAR_HPP
