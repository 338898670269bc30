#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "consist/dataset.hpp"

namespace testing_support {

/**
 * Random quadratic dataset with n <= max_n parameters in a box and
 * N <= max_N QOIs. Intervals are centred on the model values at a random
 * point; with probability `conflict` a QOI interval is shifted away, which
 * usually makes the dataset inconsistent.
 */
inline consist::Dataset random_dataset(std::uint64_t seed, int max_n = 6, int max_N = 10,
                                       double conflict = 0.4) {
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + 17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = 1 + static_cast<int>(rng() % max_n);
  const int N = 1 + static_cast<int>(rng() % max_N);
  consist::Dataset d;
  d.name = "random_" + std::to_string(seed);
  d.box.lower = consist::Vector(n);
  d.box.upper = consist::Vector(n);
  for (int i = 0; i < n; ++i) {
    d.parameter_names.push_back("x" + std::to_string(i + 1));
    d.box.lower(i) = -1.0 - unit(rng);
    d.box.upper(i) = 1.0 + unit(rng);
  }
  consist::Vector x0(n);
  for (int i = 0; i < n; ++i) x0(i) = 0.8 * u(rng);
  for (int e = 0; e < N; ++e) {
    consist::Matrix c(n + 1, n + 1);
    for (int r = 0; r <= n; ++r) {
      for (int k = r; k <= n; ++k) c(r, k) = c(k, r) = u(rng) * (r == 0 || k == 0 ? 1.0 : 0.5);
    }
    consist::QoiConstraint q;
    q.name = "Q" + std::to_string(e + 1);
    q.model = consist::QuadraticModel(c);
    const double centre = consist::evaluate_quadratic(q.model, x0);
    const double half = 0.05 + 0.4 * unit(rng);
    const double shift = unit(rng) < conflict ? (unit(rng) < 0.5 ? -1.0 : 1.0) * (0.5 + 1.5 * unit(rng)) : 0.0;
    q.lower = centre + shift - half;
    q.upper = centre + shift + half;
    d.qois.push_back(std::move(q));
  }
  return d;
}

}  // namespace testing_support
