#pragma once

#include "gts/forecast.hpp"
#include "gts/panel.hpp"
#include "gts/reconcile.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gts::boot {

struct IntervalOptions {
    /// Nominal coverage is 1 - alpha.
    double alpha = 0.2;
    /// Outer maximum-entropy bootstrap replicates (B).
    std::size_t replicates = 100;
    /// Inner simulated paths per replicate (P).
    std::size_t paths = 100;
    std::uint64_t seed = 1;
    SMode s_mode = SMode::forecast;
    std::size_t threads = 1;
    /// The run fails when more than this fraction of replicates is skipped.
    double max_skip_fraction = 0.2;
};

/// Averaged prediction intervals for one method: m x H bounds.
struct IntervalForecasts {
    Method method = Method::base;
    Eigen::MatrixXd lower;
    Eigen::MatrixXd upper;
};

struct IntervalResult {
    double alpha = 0.0;
    std::size_t replicates = 0;
    std::size_t paths = 0;
    std::size_t skipped = 0;
    std::vector<IntervalForecasts> methods;
    std::vector<std::string> warnings;

    [[nodiscard]] const IntervalForecasts& at(Method method) const;
};

/**
 * @brief Prediction intervals from a maximum-entropy bootstrap of the panel
 * nested with a parametric bootstrap of future paths.
 *
 * For each of B replicates (seeded stats::replicate_seed(seed, b)): one
 * panel replicate of every rate series and every bottom log-exposure series;
 * an automatic ARIMA fit per needed series; P simulated rate paths and P
 * simulated exposure paths; each simulated forecast reconciled with the
 * summing matrix of its own exposures (forecast mode) or of
 * `holdout_bottom_exposures` (holdout mode, m_K x H); alpha/2 and 1 - alpha/2
 * quantiles per node and horizon. The bounds are averaged over replicates in
 * replicate order, so results do not depend on the thread count.
 *
 * Innovations of the rate paths are jointly Gaussian across series with the
 * correlation of the fitted models' in-sample residuals; exposure paths are
 * drawn the same way from a separate stream. All methods of one call share
 * the paths, so base and bottom-up agree at the bottom level.
 * A replicate with a failed fit is skipped with a warning; std::runtime_error
 * when more than max_skip_fraction of them are skipped. Method::gls is not
 * supported (std::invalid_argument).
 */
[[nodiscard]] IntervalResult interval_forecasts(const Panel& train, std::size_t horizon,
                                                std::span<const Method> methods, const ModelingOptions& modeling,
                                                const IntervalOptions& options,
                                                const Eigen::MatrixXd& holdout_bottom_exposures = {});

}  // namespace gts::boot
