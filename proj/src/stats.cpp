#include "gts/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace gts::stats {

double mean(std::span<const double> x) {
    if (x.empty()) {
        throw std::invalid_argument("mean of empty series");
    }
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance_mle(std::span<const double> x) {
    const double mu = mean(x);
    double ss = 0.0;
    for (double v : x) {
        ss += (v - mu) * (v - mu);
    }
    return ss / static_cast<double>(x.size());
}

double median(std::vector<double> x) {
    return quantile(std::move(x), 0.5);
}

double quantile_sorted(std::span<const double> sorted, double prob) {
    if (sorted.empty()) {
        throw std::invalid_argument("quantile of empty sample");
    }
    if (!(prob >= 0.0 && prob <= 1.0)) {
        throw std::invalid_argument("quantile probability outside [0, 1]");
    }
    const double h = static_cast<double>(sorted.size() - 1) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double quantile(std::vector<double> x, double prob) {
    std::sort(x.begin(), x.end());
    return quantile_sorted(x, prob);
}

double trimmed_mean(std::vector<double> x, double proportion) {
    if (x.empty()) {
        throw std::invalid_argument("trimmed mean of empty sample");
    }
    std::sort(x.begin(), x.end());
    const auto cut = static_cast<std::size_t>(std::floor(static_cast<double>(x.size()) * proportion));
    if (2 * cut >= x.size()) {
        return median(std::move(x));
    }
    const auto first = x.begin() + static_cast<std::ptrdiff_t>(cut);
    const auto last = x.end() - static_cast<std::ptrdiff_t>(cut);
    return std::accumulate(first, last, 0.0) / static_cast<double>(last - first);
}

std::vector<double> difference(std::span<const double> x, int d) {
    std::vector<double> out(x.begin(), x.end());
    for (int k = 0; k < d; ++k) {
        if (out.size() < 2) {
            throw std::invalid_argument("series too short to difference");
        }
        for (std::size_t t = 0; t + 1 < out.size(); ++t) {
            out[t] = out[t + 1] - out[t];
        }
        out.pop_back();
    }
    return out;
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finaliser over the combined words.
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::size_t resolve_threads(std::size_t threads) {
    if (threads > 0) {
        return threads;
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min(resolve_threads(threads), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) {
                        error = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

}  // namespace gts::stats
