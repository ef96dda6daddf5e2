#include "gts/evaluate.hpp"

#include "gts/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gts::eval {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_origins(std::size_t count, const Eigen::MatrixXd& actual, const RollingPlan& plan) {
    if (count != plan.origin_count()) {
        throw std::invalid_argument("expected " + std::to_string(plan.origin_count()) + " origins, got " +
                                    std::to_string(count));
    }
    if (static_cast<std::size_t>(actual.rows()) < plan.end) {
        throw std::invalid_argument("holdout data ends before the rolling plan");
    }
}

void check_cells(const Eigen::MatrixXd& f, const Eigen::MatrixXd& actual, const RollingPlan& plan, std::size_t i) {
    if (f.rows() != actual.cols() || static_cast<std::size_t>(f.cols()) < plan.horizon_at(i)) {
        throw std::invalid_argument("forecasts of origin " + std::to_string(i) + " do not cover " +
                                    std::to_string(plan.horizon_at(i)) + " horizons");
    }
}

std::uint64_t hash_matrices(const std::vector<Eigen::MatrixXd>& mats) {
    std::uint64_t h = stats::fnv1a({});
    for (const auto& m : mats) {
        const auto* bytes = reinterpret_cast<const char*>(m.data());
        h = stats::fnv1a(std::string_view(bytes, static_cast<std::size_t>(m.size()) * sizeof(double)), h);
    }
    return h;
}

}  // namespace

RollingPlan::RollingPlan(std::size_t first, std::size_t last) : first_origin(first), end(last) {
    if (first == 0 || first >= last) {
        throw std::invalid_argument("rolling plan needs 0 < first origin < end, got " + std::to_string(first) +
                                    " and " + std::to_string(last));
    }
}

std::size_t RollingPlan::forecast_count(std::size_t h) const {
    return h >= 1 && h <= horizon() ? horizon() - h + 1 : 0;
}

double interval_score(double lower, double upper, double y, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("alpha must lie in (0, 1)");
    }
    if (lower > upper) {
        throw std::invalid_argument("interval lower bound exceeds upper bound");
    }
    double score = upper - lower;
    if (y < lower) {
        score += 2.0 / alpha * (lower - y);
    }
    if (y > upper) {
        score += 2.0 / alpha * (y - upper);
    }
    return score;
}

SeriesScores point_scores(const std::vector<Eigen::MatrixXd>& forecasts, const Eigen::MatrixXd& actual,
                          const RollingPlan& plan) {
    check_origins(forecasts.size(), actual, plan);
    const Eigen::Index m = actual.cols();
    const auto H = static_cast<Eigen::Index>(plan.horizon());
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(m, H);
    Eigen::MatrixXd sum_abs = Eigen::MatrixXd::Zero(m, H);
    Eigen::MatrixXd sum_sq = Eigen::MatrixXd::Zero(m, H);
    SeriesScores s;
    s.counts = Eigen::MatrixXi::Zero(m, H);
    for (std::size_t i = 0; i < forecasts.size(); ++i) {
        const auto& f = forecasts[i];
        check_cells(f, actual, plan, i);
        for (std::size_t h = 1; h <= plan.horizon_at(i); ++h) {
            const auto t = static_cast<Eigen::Index>(plan.origin(i) + h - 1);
            const auto c = static_cast<Eigen::Index>(h - 1);
            for (Eigen::Index j = 0; j < m; ++j) {
                if (!std::isfinite(f(j, c))) {
                    continue;
                }
                const double e = actual(t, j) - f(j, c);
                sum(j, c) += e;
                sum_abs(j, c) += std::abs(e);
                sum_sq(j, c) += e * e;
                s.counts(j, c) += 1;
            }
        }
    }
    s.mfe = Eigen::MatrixXd::Constant(m, H, kNaN);
    s.mafe = s.mfe;
    s.rmsfe = s.mfe;
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index c = 0; c < H; ++c) {
            const int n = s.counts(j, c);
            if (n > 0) {
                s.mfe(j, c) = sum(j, c) / n;
                s.mafe(j, c) = sum_abs(j, c) / n;
                s.rmsfe(j, c) = std::sqrt(sum_sq(j, c) / n);
            }
        }
    }
    return s;
}

Eigen::MatrixXd mean_interval_scores(const std::vector<Eigen::MatrixXd>& lower, const std::vector<Eigen::MatrixXd>& upper,
                                     const Eigen::MatrixXd& actual, const RollingPlan& plan, double alpha) {
    check_origins(lower.size(), actual, plan);
    check_origins(upper.size(), actual, plan);
    const Eigen::Index m = actual.cols();
    const auto H = static_cast<Eigen::Index>(plan.horizon());
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(m, H);
    Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(m, H);
    for (std::size_t i = 0; i < lower.size(); ++i) {
        check_cells(lower[i], actual, plan, i);
        check_cells(upper[i], actual, plan, i);
        for (std::size_t h = 1; h <= plan.horizon_at(i); ++h) {
            const auto t = static_cast<Eigen::Index>(plan.origin(i) + h - 1);
            const auto c = static_cast<Eigen::Index>(h - 1);
            for (Eigen::Index j = 0; j < m; ++j) {
                const double L = lower[i](j, c);
                const double U = upper[i](j, c);
                if (!std::isfinite(L) || !std::isfinite(U)) {
                    continue;
                }
                sum(j, c) += interval_score(L, U, actual(t, j), alpha);
                counts(j, c) += 1;
            }
        }
    }
    Eigen::MatrixXd out = Eigen::MatrixXd::Constant(m, H, kNaN);
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index c = 0; c < H; ++c) {
            if (counts(j, c) > 0) {
                out(j, c) = sum(j, c) / counts(j, c);
            }
        }
    }
    return out;
}

ScoreTable level_table(const GroupedHierarchy& hierarchy, const Eigen::MatrixXd& by_series, std::string metric) {
    if (by_series.rows() != static_cast<Eigen::Index>(hierarchy.size())) {
        throw std::invalid_argument("score matrix does not match the hierarchy");
    }
    const std::size_t levels = hierarchy.level_count();
    const Eigen::Index H = by_series.cols();
    ScoreTable t;
    t.metric = std::move(metric);
    t.values = Eigen::MatrixXd::Constant(H, static_cast<Eigen::Index>(levels), kNaN);
    t.mean = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(levels), kNaN);
    t.median = t.mean;
    for (std::size_t l = 0; l < levels; ++l) {
        t.levels.push_back(hierarchy.level_name(l));
        const auto nodes = hierarchy.nodes_at_level(l);
        const auto col = static_cast<Eigen::Index>(l);
        std::vector<double> finite;
        for (Eigen::Index c = 0; c < H; ++c) {
            double total = 0.0;
            std::size_t n = 0;
            for (std::size_t j : nodes) {
                const double v = by_series(static_cast<Eigen::Index>(j), c);
                if (std::isfinite(v)) {
                    total += v;
                    ++n;
                }
            }
            if (n > 0) {
                t.values(c, col) = total / static_cast<double>(n);
                finite.push_back(t.values(c, col));
            }
        }
        if (!finite.empty()) {
            t.mean(col) = stats::mean(finite);
            t.median(col) = stats::median(finite);
        }
    }
    return t;
}

const MethodScores& RollingResult::at(Method method) const {
    for (const auto& m : methods) {
        if (m.method == method) {
            return m;
        }
    }
    throw std::out_of_range("no scores for method " + std::string(to_string(method)));
}

RollingResult run_rolling(const Panel& panel, const RollingPlan& plan, const RollingOptions& options) {
    if (plan.end > panel.length()) {
        throw std::invalid_argument("rolling plan ends at observation " + std::to_string(plan.end) +
                                    " but the panel has " + std::to_string(panel.length()));
    }
    if (options.methods.empty()) {
        throw std::invalid_argument("no methods requested");
    }
    const auto& hierarchy = panel.hierarchy();
    const std::size_t m = hierarchy.size();
    const std::size_t mk = hierarchy.bottom_count();
    const std::size_t origins = plan.origin_count();
    const bool reconciles = std::any_of(options.methods.begin(), options.methods.end(),
                                        [](Method x) { return x != Method::base; });
    const bool forecast_exposures = reconciles && options.s_mode == SMode::forecast;

    std::vector<Method> interval_methods;
    RollingResult result;
    if (options.intervals) {
        for (Method x : options.methods) {
            if (x == Method::gls) {
                result.warnings.push_back("prediction intervals are not produced for the gls method");
            } else {
                interval_methods.push_back(x);
            }
        }
    }

    struct OriginOutput {
        BaseForecasts base;
        std::vector<ForecastSet> sets;
        std::optional<boot::IntervalResult> intervals;
        std::string error;
    };
    std::vector<OriginOutput> out(origins);
    const std::size_t outer_threads = stats::resolve_threads(options.threads);

    stats::parallel_for(origins, outer_threads, [&](std::size_t i) {
        const std::size_t n = plan.origin(i);
        const std::size_t H = plan.horizon_at(i);
        const Panel train = panel.head(n);
        auto& o = out[i];
        o.base = base_forecasts(train, H, options.modeling, forecast_exposures, 1);
        const double lost = static_cast<double>(o.base.failure_count());
        if (lost > options.max_failure_fraction * static_cast<double>(m)) {
            o.error = "origin " + std::to_string(n) + " lost " + std::to_string(o.base.failure_count()) + " of " +
                      std::to_string(m) + " series";
            return;
        }
        Eigen::MatrixXd holdout(static_cast<Eigen::Index>(mk), static_cast<Eigen::Index>(H));
        for (std::size_t h = 0; h < H; ++h) {
            const auto e = panel.bottom_exposures_at(n + h);
            for (std::size_t k = 0; k < mk; ++k) {
                holdout(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(h)) = e[k];
            }
        }
        const Eigen::MatrixXd& s_exposures = options.s_mode == SMode::forecast ? o.base.bottom_exposures : holdout;
        for (Method x : options.methods) {
            o.sets.push_back(reconcile_forecasts(hierarchy, o.base, x, options.s_mode, s_exposures));
        }
        if (!interval_methods.empty()) {
            auto io = options.interval_options;
            io.seed = stats::stream_seed(options.interval_options.seed, i);
            io.s_mode = options.s_mode;
            io.threads = 1;
            o.intervals = boot::interval_forecasts(train, H, interval_methods, options.modeling, io, holdout);
        }
    });

    for (std::size_t i = 0; i < origins; ++i) {
        if (!out[i].error.empty()) {
            throw std::runtime_error(out[i].error);
        }
        for (std::size_t j = 0; j < m; ++j) {
            if (!out[i].base.failures[j].empty()) {
                result.warnings.push_back("origin " + std::to_string(plan.origin(i)) + ", series " +
                                          hierarchy.label(j) + ": " + out[i].base.failures[j]);
            }
        }
        if (out[i].intervals) {
            for (const auto& w : out[i].intervals->warnings) {
                result.warnings.push_back("origin " + std::to_string(plan.origin(i)) + ": " + w);
            }
        }
        result.base_forecasts.push_back(out[i].base.rates);
    }
    result.base_hash = hash_matrices(result.base_forecasts);

    const Eigen::MatrixXd actual = panel.rate_matrix();
    for (std::size_t k = 0; k < options.methods.size(); ++k) {
        const Method x = options.methods[k];
        std::vector<Eigen::MatrixXd> values;
        for (std::size_t i = 0; i < origins; ++i) {
            values.push_back(out[i].sets[k].values);
        }
        MethodScores ms;
        ms.method = x;
        ms.series = point_scores(values, actual, plan);
        ms.mfe = level_table(hierarchy, ms.series.mfe, "MFE");
        ms.mafe = level_table(hierarchy, ms.series.mafe, "MAFE");
        ms.rmsfe = level_table(hierarchy, ms.series.rmsfe, "RMSFE");
        if (std::find(interval_methods.begin(), interval_methods.end(), x) != interval_methods.end()) {
            std::vector<Eigen::MatrixXd> lower;
            std::vector<Eigen::MatrixXd> upper;
            for (std::size_t i = 0; i < origins; ++i) {
                lower.push_back(out[i].intervals->at(x).lower);
                upper.push_back(out[i].intervals->at(x).upper);
            }
            ms.series_interval_score =
                mean_interval_scores(lower, upper, actual, plan, options.interval_options.alpha);
            ms.interval_score = level_table(hierarchy, *ms.series_interval_score, "IntervalScore");
        }
        result.methods.push_back(std::move(ms));
    }
    return result;
}

}  // namespace gts::eval
