#include "gts/forecast.hpp"

#include "gts/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gts {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool needs_all_rates(Method method) {
    return method == Method::base || method == Method::ols || method == Method::gls;
}

}  // namespace

std::string_view to_string(SMode mode) {
    return mode == SMode::forecast ? "forecast" : "holdout";
}

std::optional<SMode> parse_s_mode(std::string_view name) {
    if (name == "forecast") {
        return SMode::forecast;
    }
    if (name == "holdout") {
        return SMode::holdout;
    }
    return std::nullopt;
}

std::size_t BaseForecasts::failure_count() const {
    std::size_t count = 0;
    for (const auto& f : failures) {
        count += f.empty() ? 0 : 1;
    }
    return count;
}

arima::Model fit_rate_model(std::span<const double> rates, const ModelingOptions& options) {
    if (!options.log_rates) {
        return arima::auto_fit(rates, options.rate_bounds);
    }
    std::vector<double> logged(rates.size());
    for (std::size_t t = 0; t < rates.size(); ++t) {
        if (!(rates[t] > 0.0)) {
            throw std::domain_error("log-scale rate model needs positive rates");
        }
        logged[t] = std::log(rates[t]);
    }
    return arima::auto_fit(logged, options.rate_bounds);
}

BaseForecasts base_forecasts(const Panel& train, std::size_t horizon, const ModelingOptions& options,
                             bool with_exposures, std::size_t threads) {
    if (horizon == 0) {
        throw std::invalid_argument("forecast horizon must be at least 1");
    }
    const auto& h = train.hierarchy();
    const std::size_t m = h.size();
    const std::size_t mk = h.bottom_count();
    const std::size_t offset = h.bottom_offset();
    const auto H = static_cast<Eigen::Index>(horizon);

    BaseForecasts out;
    out.rates = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(m), H, kNaN);
    out.one_step_variance.assign(m, kNaN);
    out.orders.assign(m, arima::Order{});
    out.failures.assign(m, std::string{});
    if (with_exposures) {
        out.bottom_exposures = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(mk), H, kNaN);
    }
    const std::size_t tasks = m + (with_exposures ? mk : 0);
    std::vector<std::string> exposure_failures(mk);

    stats::parallel_for(tasks, threads, [&](std::size_t task) {
        if (task < m) {
            const auto row = static_cast<Eigen::Index>(task);
            try {
                const auto model = fit_rate_model(train.node(task).rate, options);
                const auto fc = arima::forecast(model, horizon);
                for (Eigen::Index j = 0; j < H; ++j) {
                    const double v = fc.mean[static_cast<std::size_t>(j)];
                    out.rates(row, j) = options.log_rates ? std::exp(v) : v;
                }
                double var = fc.one_step_variance;
                if (options.log_rates) {
                    var *= out.rates(row, 0) * out.rates(row, 0);
                }
                out.one_step_variance[task] = var;
                out.orders[task] = model.order;
            } catch (const std::exception& e) {
                out.failures[task] = e.what();
            }
            return;
        }
        const std::size_t k = task - m;
        try {
            const auto fc = arima::fit_forecast_log_exposure(train.node(offset + k).exposure, horizon,
                                                             options.exposure_bounds);
            for (Eigen::Index j = 0; j < H; ++j) {
                out.bottom_exposures(static_cast<Eigen::Index>(k), j) = fc.mean[static_cast<std::size_t>(j)];
            }
        } catch (const std::exception& e) {
            exposure_failures[k] = std::string("exposure: ") + e.what();
        }
    });
    for (std::size_t k = 0; k < mk; ++k) {
        if (!exposure_failures[k].empty() && out.failures[offset + k].empty()) {
            out.failures[offset + k] = exposure_failures[k];
        }
    }
    return out;
}

ForecastSet reconcile_forecasts(const GroupedHierarchy& hierarchy, const BaseForecasts& base, Method method,
                                SMode s_mode, const Eigen::MatrixXd& bottom_exposures) {
    const auto m = static_cast<Eigen::Index>(hierarchy.size());
    const auto mk = static_cast<Eigen::Index>(hierarchy.bottom_count());
    const Eigen::Index H = base.rates.cols();
    if (base.rates.rows() != m) {
        throw std::invalid_argument("base forecasts do not match the hierarchy");
    }
    ForecastSet out;
    out.method = method;
    out.s_mode = s_mode;
    out.values = Eigen::MatrixXd::Constant(m, H, kNaN);
    out.bottom = Eigen::MatrixXd::Constant(mk, H, kNaN);

    if (method == Method::base) {
        out.values = base.rates;
        out.bottom = base.rates.bottomRows(mk);
        return out;
    }
    if (bottom_exposures.rows() != mk || bottom_exposures.cols() < H) {
        throw std::invalid_argument("reconciliation needs " + std::to_string(mk) + " x " + std::to_string(H) +
                                    " bottom exposures");
    }
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < hierarchy.size(); ++i) {
        labels.push_back(hierarchy.label(i));
    }
    for (Eigen::Index j = 0; j < H; ++j) {
        const Eigen::VectorXd col = base.rates.col(j);
        const Eigen::VectorXd exp_col = bottom_exposures.col(j);
        const bool inputs_ok = exp_col.allFinite() &&
                               (needs_all_rates(method) ? col.allFinite() : col.tail(mk).allFinite());
        if (!inputs_ok) {
            continue;
        }
        const auto S = summing_matrix_rates(hierarchy, std::span<const double>(exp_col.data(), exp_col.size()),
                                            static_cast<std::size_t>(j + 1));
        const auto r = reconcile(method, S, std::span<const double>(col.data(), col.size()),
                                 base.one_step_variance, labels);
        out.values.col(j) = r.values;
        out.bottom.col(j) = r.bottom;
    }
    return out;
}

}  // namespace gts
