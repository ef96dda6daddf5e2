#pragma once

#include <cstddef>
#include <span>

namespace gts::arima {

/// 5% critical value of the level-stationarity KPSS statistic.
inline constexpr double kKpssCritical5 = 0.463;

struct KpssResult {
    double statistic = 0.0;
    std::size_t lags = 0;
    /// True when the statistic does not exceed the 5% critical value, or the
    /// series is constant.
    bool stationary = true;
};

/// Bartlett lag truncation floor(4 * (n / 100)^(1/4)).
[[nodiscard]] std::size_t kpss_lags(std::size_t n);

/**
 * @brief KPSS test with a level-stationary null.
 *
 * statistic = n^-2 * sum_t S_t^2 / s^2, where S_t are partial sums of the
 * demeaned series and s^2 is the Bartlett-window long-run variance.
 * A constant series reports statistic 0 and a stationary verdict.
 * Throws std::invalid_argument when n < 10.
 */
[[nodiscard]] KpssResult kpss_test(std::span<const double> x);

[[nodiscard]] inline double kpss_statistic(std::span<const double> x) {
    return kpss_test(x).statistic;
}

/**
 * @brief Number of differences: the smallest d <= d_max whose d-times
 * differenced series passes KPSS at 5%, or d_max when none pass.
 * Throws std::invalid_argument when n - d_max < 10.
 */
[[nodiscard]] int select_d(std::span<const double> x, int d_max);

}  // namespace gts::arima
