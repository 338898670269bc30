#ifndef CONSIST_PARALLEL_HPP
#define CONSIST_PARALLEL_HPP

#include <cstdint>
#include <functional>

namespace consist {

/// Worker count from the CONSIST_THREADS environment variable (default 1).
int thread_count();

/// Runs fn(i) for i in [0, n) on up to thread_count() threads. Results must be
/// written to per-index slots; the first exception thrown is rethrown.
void parallel_for(int n, const std::function<void(int)>& fn);

/// splitmix64 step, used to derive independent seeds from a master seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace consist

#endif  // CONSIST_PARALLEL_HPP
