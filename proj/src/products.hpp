#ifndef CONSIST_SRC_PRODUCTS_HPP
#define CONSIST_SRC_PRODUCTS_HPP

#include <algorithm>
#include <random>
#include <utility>
#include <vector>

#include "consist/parallel.hpp"
#include "consist/scalar.hpp"

namespace consist::detail {

/// Index pairs (i <= j) of linear rows whose products enter a relaxation.
inline std::vector<std::pair<int, int>> product_pairs(int count, const SdpOptions& options) {
  std::vector<std::pair<int, int>> pairs;
  if (!options.products || count == 0) return pairs;
  if (count <= options.all_pairs_limit) {
    for (int i = 0; i < count; ++i) {
      for (int j = i; j < count; ++j) pairs.emplace_back(i, j);
    }
    return pairs;
  }
  for (int i = 0; i < count; ++i) pairs.emplace_back(i, i);
  std::vector<std::pair<int, int>> off;
  for (int i = 0; i < count; ++i) {
    for (int j = i + 1; j < count; ++j) off.emplace_back(i, j);
  }
  std::mt19937_64 rng(mix_seed(options.seed, 17));
  const int take = std::min<int>(options.random_pairs, static_cast<int>(off.size()));
  for (int k = 0; k < take; ++k) {
    const auto span = static_cast<std::uint64_t>(off.size() - k);
    const int pick = k + static_cast<int>(rng() % span);
    std::swap(off[k], off[pick]);
  }
  off.resize(take);
  std::sort(off.begin(), off.end());
  pairs.insert(pairs.end(), off.begin(), off.end());
  return pairs;
}

}  // namespace consist::detail

#endif  // CONSIST_SRC_PRODUCTS_HPP
