#pragma once

#include "gts/forecast.hpp"
#include "gts/intervals.hpp"
#include "gts/panel.hpp"
#include "gts/reconcile.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gts::eval {

/**
 * @brief Expanding-window forecast origins.
 *
 * Origin i trains on the first first_origin + i observations, i = 0..H-1,
 * with H = end - first_origin, and forecasts up to observation `end`. Horizon
 * h therefore has H - h + 1 forecasts.
 */
struct RollingPlan {
    std::size_t first_origin = 0;
    std::size_t end = 0;

    /// Throws std::invalid_argument unless 0 < first_origin < end.
    RollingPlan(std::size_t first_origin, std::size_t end);

    [[nodiscard]] std::size_t horizon() const { return end - first_origin; }
    [[nodiscard]] std::size_t origin_count() const { return horizon(); }
    /// Training length of origin i.
    [[nodiscard]] std::size_t origin(std::size_t i) const { return first_origin + i; }
    /// Forecast horizons available from origin i.
    [[nodiscard]] std::size_t horizon_at(std::size_t i) const { return end - origin(i); }
    /// Number of h-step forecasts (h >= 1); 0 beyond the plan.
    [[nodiscard]] std::size_t forecast_count(std::size_t h) const;
};

/// (U - L) + (2/alpha)(L - y)1{y < L} + (2/alpha)(y - U)1{y > U}.
/// Throws std::invalid_argument when L > U or alpha is outside (0, 1).
[[nodiscard]] double interval_score(double lower, double upper, double y, double alpha);

/// Per-series, per-horizon averages; m x H, NaN where no forecast was scored.
struct SeriesScores {
    Eigen::MatrixXd mfe;
    Eigen::MatrixXd mafe;
    Eigen::MatrixXd rmsfe;
    Eigen::MatrixXi counts;
};

/**
 * @brief MFE, MAFE and RMSFE of rolling forecasts with error actual - forecast.
 *
 * forecasts[i] is the m x horizon_at(i) matrix from origin i; `actual` is the
 * length x m rate matrix. NaN forecasts are excluded from the averages.
 * Throws std::invalid_argument on missing origins or short matrices.
 */
[[nodiscard]] SeriesScores point_scores(const std::vector<Eigen::MatrixXd>& forecasts, const Eigen::MatrixXd& actual,
                                        const RollingPlan& plan);

/// Mean interval score per series and horizon (m x H), NaN where unscored.
[[nodiscard]] Eigen::MatrixXd mean_interval_scores(const std::vector<Eigen::MatrixXd>& lower,
                                                   const std::vector<Eigen::MatrixXd>& upper,
                                                   const Eigen::MatrixXd& actual, const RollingPlan& plan,
                                                   double alpha);

/**
 * @brief Horizon x level table of level-averaged scores with mean and median
 * rows over horizons. Raw values; presentation scales them by 100.
 */
struct ScoreTable {
    std::string metric;
    std::vector<std::string> levels;
    /// H x levels.
    Eigen::MatrixXd values;
    Eigen::VectorXd mean;
    Eigen::VectorXd median;
};

/// Averages each horizon's per-series values over the series of every level,
/// skipping NaN entries.
[[nodiscard]] ScoreTable level_table(const GroupedHierarchy& hierarchy, const Eigen::MatrixXd& by_series,
                                     std::string metric);

struct RollingOptions {
    std::vector<Method> methods{Method::base, Method::bottom_up, Method::ols, Method::gls};
    SMode s_mode = SMode::forecast;
    ModelingOptions modeling;
    bool intervals = false;
    boot::IntervalOptions interval_options;
    std::size_t threads = 1;
    /// An origin losing more than this fraction of series aborts the run.
    double max_failure_fraction = 0.2;
};

struct MethodScores {
    Method method = Method::base;
    SeriesScores series;
    ScoreTable mfe;
    ScoreTable mafe;
    ScoreTable rmsfe;
    std::optional<ScoreTable> interval_score;
    std::optional<Eigen::MatrixXd> series_interval_score;
};

struct RollingResult {
    std::vector<MethodScores> methods;
    /// Base rate forecasts of every origin.
    std::vector<Eigen::MatrixXd> base_forecasts;
    /// FNV-1a hash of the base forecast bytes across origins.
    std::uint64_t base_hash = 0;
    std::vector<std::string> warnings;

    [[nodiscard]] const MethodScores& at(Method method) const;
};

/**
 * @brief Rolling-origin evaluation.
 *
 * At each origin every series is refitted on the training window, forecast
 * to the end of the plan, reconciled with summing matrices from forecast or
 * realised exposures, and scored against the holdout. Origins run in
 * parallel; the interval bootstrap of origin i uses seed
 * stats::stream_seed(interval_options.seed, i). Failed fits are excluded and
 * reported in `warnings`; std::runtime_error when an origin loses more than
 * max_failure_fraction of its series.
 */
[[nodiscard]] RollingResult run_rolling(const Panel& panel, const RollingPlan& plan, const RollingOptions& options);

}  // namespace gts::eval
