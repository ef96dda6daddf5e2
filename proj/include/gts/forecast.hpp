#pragma once

#include "gts/arima.hpp"
#include "gts/panel.hpp"
#include "gts/reconcile.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gts {

/// Source of the exposures behind the horizon-h rates summing matrix.
enum class SMode { forecast, holdout };

[[nodiscard]] std::string_view to_string(SMode mode);
[[nodiscard]] std::optional<SMode> parse_s_mode(std::string_view name);

struct ModelingOptions {
    arima::OrderBounds rate_bounds;
    arima::OrderBounds exposure_bounds = arima::exposure_bounds();
    /// Model log(rate) and back-transform; raw rates otherwise.
    bool log_rates = false;
};

/**
 * @brief Per-series base forecasts of a training panel.
 *
 * A series whose automatic fit fails has NaN forecasts and a nonempty entry
 * in `failures`.
 */
struct BaseForecasts {
    /// m x H rate forecasts.
    Eigen::MatrixXd rates;
    /// One-step forecast variance of each rate series.
    std::vector<double> one_step_variance;
    /// m_K x H bottom exposure forecasts (empty unless requested).
    Eigen::MatrixXd bottom_exposures;
    std::vector<arima::Order> orders;
    std::vector<std::string> failures;

    [[nodiscard]] std::size_t failure_count() const;
};

/// Automatic ARIMA rate forecasts for every node, plus log-scale bottom
/// exposure forecasts when `with_exposures` is set. Series are fitted in parallel.
[[nodiscard]] BaseForecasts base_forecasts(const Panel& train, std::size_t horizon, const ModelingOptions& options,
                                           bool with_exposures, std::size_t threads = 1);

/// Rate model and back-transform shared by point forecasts and simulation.
[[nodiscard]] arima::Model fit_rate_model(std::span<const double> rates, const ModelingOptions& options);

/// Reconciled (or base) forecasts for horizons 1..H.
struct ForecastSet {
    Method method = Method::base;
    SMode s_mode = SMode::forecast;
    /// m x H values; NaN where inputs were unavailable.
    Eigen::MatrixXd values;
    /// m_K x H bottom-level coefficient vectors.
    Eigen::MatrixXd bottom;
};

/**
 * @brief Reconciles base forecasts horizon by horizon.
 *
 * The horizon-h summing matrix comes from column h of `bottom_exposures`
 * (forecast or holdout, per `s_mode`). A horizon whose required inputs
 * contain NaN yields NaN values for that horizon.
 */
[[nodiscard]] ForecastSet reconcile_forecasts(const GroupedHierarchy& hierarchy, const BaseForecasts& base,
                                              Method method, SMode s_mode,
                                              const Eigen::MatrixXd& bottom_exposures);

}  // namespace gts
