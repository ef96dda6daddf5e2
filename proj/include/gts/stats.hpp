#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace gts::stats {

[[nodiscard]] double mean(std::span<const double> x);
/// Sample variance with denominator n (maximum-likelihood form).
[[nodiscard]] double variance_mle(std::span<const double> x);
[[nodiscard]] double median(std::vector<double> x);

/// Type-7 quantile (linear interpolation between order statistics) of sorted data.
[[nodiscard]] double quantile_sorted(std::span<const double> sorted, double prob);
[[nodiscard]] double quantile(std::vector<double> x, double prob);

/// Symmetric trimmed mean dropping floor(n * proportion) values from each end.
[[nodiscard]] double trimmed_mean(std::vector<double> x, double proportion);

/// d-th order differences.
[[nodiscard]] std::vector<double> difference(std::span<const double> x, int d);

/// 64-bit FNV-1a hash, used for provenance stamps and output fingerprints.
[[nodiscard]] std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 14695981039346656037ULL);

/// Seed of the `index`-th parallel replicate.
[[nodiscard]] constexpr std::uint64_t replicate_seed(std::uint64_t base, std::uint64_t index) {
    return base + index;
}

/// Independent stream seed for a (replicate seed, stream id) pair.
[[nodiscard]] std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream);

/// Worker count for a `threads` request (0 = hardware concurrency).
[[nodiscard]] std::size_t resolve_threads(std::size_t threads);

/**
 * Runs body(i) for i in [0, count) on up to `threads` workers. Each index is
 * executed exactly once; callers write results into per-index slots so the
 * outcome is independent of the thread count. The first exception thrown by
 * any body is rethrown after all workers join.
 */
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace gts::stats
