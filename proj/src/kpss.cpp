#include "gts/kpss.hpp"

#include "gts/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace gts::arima {

std::size_t kpss_lags(std::size_t n) {
    return static_cast<std::size_t>(std::floor(4.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

KpssResult kpss_test(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 10) {
        throw std::invalid_argument("KPSS needs at least 10 observations, got " + std::to_string(n));
    }
    KpssResult result;
    result.lags = kpss_lags(n);

    const double mu = stats::mean(x);
    std::vector<double> e(n);
    double max_dev = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        e[t] = x[t] - mu;
        max_dev = std::max(max_dev, std::abs(e[t]));
    }
    if (max_dev <= 1e-12 * std::max(1.0, std::abs(mu))) {
        return result;
    }

    double partial = 0.0;
    double eta = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        partial += e[t];
        eta += partial * partial;
    }
    eta /= static_cast<double>(n) * static_cast<double>(n);

    double s2 = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        s2 += e[t] * e[t];
    }
    for (std::size_t lag = 1; lag <= result.lags && lag < n; ++lag) {
        double acc = 0.0;
        for (std::size_t t = lag; t < n; ++t) {
            acc += e[t] * e[t - lag];
        }
        s2 += 2.0 * (1.0 - static_cast<double>(lag) / static_cast<double>(result.lags + 1)) * acc;
    }
    s2 /= static_cast<double>(n);
    if (s2 <= 0.0) {
        return result;
    }

    result.statistic = eta / s2;
    result.stationary = result.statistic <= kKpssCritical5;
    return result;
}

int select_d(std::span<const double> x, int d_max) {
    if (d_max < 0) {
        throw std::invalid_argument("d_max must be nonnegative");
    }
    if (x.size() < static_cast<std::size_t>(d_max) + 10) {
        throw std::invalid_argument("series too short for differencing order selection");
    }
    std::vector<double> w(x.begin(), x.end());
    for (int d = 0; d < d_max; ++d) {
        if (kpss_test(w).stationary) {
            return d;
        }
        w = stats::difference(w, 1);
    }
    return d_max;
}

}  // namespace gts::arima
