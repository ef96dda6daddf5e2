#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

namespace gts::boot {

/// Proportion trimmed from each end when averaging successive absolute differences.
inline constexpr double kTrimProportion = 0.10;

/**
 * @brief Maximum-entropy density of one series.
 *
 * Intervals (z_{k-1}, z_k], k = 1..n, each carry probability 1/n and mean
 * m_k. Interior intervals are uniform; the two tail intervals carry the
 * maximum-entropy density on a bounded interval with the prescribed mean,
 * a truncated exponential, so every draw lies in [z_0, z_n].
 */
class MebootPlan {
public:
    /// Throws std::invalid_argument when x has fewer than 4 values.
    explicit MebootPlan(std::span<const double> x);

    [[nodiscard]] std::size_t size() const { return sorted_.size(); }
    [[nodiscard]] const std::vector<double>& sorted() const { return sorted_; }
    /// order()[i] is the time index of the i-th smallest value (stable for ties).
    [[nodiscard]] const std::vector<std::size_t>& order() const { return order_; }
    /// z_0, ..., z_n.
    [[nodiscard]] const std::vector<double>& limits() const { return z_; }
    /// m_1, ..., m_n.
    [[nodiscard]] const std::vector<double>& interval_means() const { return means_; }
    [[nodiscard]] double trimmed_deviation() const { return m_trim_; }
    [[nodiscard]] bool constant() const { return constant_; }

    /// Quantile function of the density at u in [0, 1].
    [[nodiscard]] double quantile(double u) const;

    /// Replicate from ascending uniforms: quantiles placed by the ordering index.
    [[nodiscard]] std::vector<double> replicate(std::span<const double> sorted_uniforms) const;

private:
    std::vector<double> sorted_;
    std::vector<std::size_t> order_;
    std::vector<double> z_;
    std::vector<double> means_;
    double m_trim_ = 0.0;
    double lower_rate_ = 0.0;
    double upper_rate_ = 0.0;
    bool constant_ = false;
};

/// n ascending Uniform[0, 1) draws.
[[nodiscard]] std::vector<double> sorted_uniforms(std::size_t n, std::mt19937_64& rng);

/// One replicate of x; a constant series is returned unchanged.
[[nodiscard]] std::vector<double> meboot_replicate(std::span<const double> x, std::mt19937_64& rng);

/**
 * @brief One replicate of every series of an aligned panel. The same sorted
 * uniforms drive every series; each keeps its own ordering index.
 * Throws std::invalid_argument on misaligned lengths.
 */
[[nodiscard]] std::vector<std::vector<double>> meboot_panel(const std::vector<std::vector<double>>& series,
                                                            std::mt19937_64& rng);

[[nodiscard]] std::vector<std::vector<double>> meboot_panel(const std::vector<MebootPlan>& plans,
                                                            std::mt19937_64& rng);

}  // namespace gts::boot
