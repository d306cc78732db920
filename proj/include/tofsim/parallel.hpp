#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace tofsim {

/// Worker count: TOFSIM_THREADS if set and > 0, otherwise hardware concurrency.
unsigned worker_count();

/// Runs body(i) for i in [0, n) across worker_count() threads. Each index is
/// visited exactly once; callers write results by index so the outcome does
/// not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed for task `index` under a global seed; order-independent.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return mix64(seed ^ mix64(index + 0x632BE59BD9B4E019ULL));
}

}  // namespace tofsim
