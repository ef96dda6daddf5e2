#include "gts/intervals.hpp"

#include "gts/meboot.hpp"
#include "gts/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>

namespace gts::boot {

namespace {

struct ReplicateBounds {
    std::string failure;
    std::vector<Eigen::MatrixXd> lower;
    std::vector<Eigen::MatrixXd> upper;
};

void validate(const Panel& train, std::size_t horizon, std::span<const Method> methods,
              const IntervalOptions& options, const Eigen::MatrixXd& holdout) {
    if (!(options.alpha > 0.0 && options.alpha < 1.0)) {
        throw std::invalid_argument("alpha must lie in (0, 1)");
    }
    if (options.replicates < 2 || options.paths < 2) {
        throw std::invalid_argument("interval forecasts need at least 2 replicates and 2 paths");
    }
    if (horizon == 0) {
        throw std::invalid_argument("forecast horizon must be at least 1");
    }
    if (methods.empty()) {
        throw std::invalid_argument("no methods requested");
    }
    for (Method m : methods) {
        if (m == Method::gls) {
            throw std::invalid_argument("prediction intervals are not available for the gls method");
        }
    }
    if (options.s_mode == SMode::holdout) {
        const auto mk = static_cast<Eigen::Index>(train.hierarchy().bottom_count());
        if (holdout.rows() != mk || holdout.cols() < static_cast<Eigen::Index>(horizon)) {
            throw std::invalid_argument("holdout mode needs bottom exposures for every horizon");
        }
    }
}

/// Correlation of the models' in-sample residuals over their common final
/// stretch; degenerate models get unit diagonal entries only.
Eigen::MatrixXd residual_correlation(const std::vector<const arima::Model*>& models) {
    const auto n = static_cast<Eigen::Index>(models.size());
    Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(n, n);
    std::vector<Eigen::Index> active;
    std::size_t length = std::numeric_limits<std::size_t>::max();
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto* model = models[static_cast<std::size_t>(i)];
        if (!model->deterministic() && model->residuals.size() >= 3) {
            active.push_back(i);
            length = std::min(length, model->residuals.size());
        }
    }
    if (active.size() < 2) {
        return corr;
    }
    const auto L = static_cast<Eigen::Index>(length);
    Eigen::MatrixXd r(L, static_cast<Eigen::Index>(active.size()));
    for (std::size_t a = 0; a < active.size(); ++a) {
        const auto& res = models[static_cast<std::size_t>(active[a])]->residuals;
        const auto first = static_cast<Eigen::Index>(res.size()) - L;
        for (Eigen::Index t = 0; t < L; ++t) {
            r(t, static_cast<Eigen::Index>(a)) = res[static_cast<std::size_t>(first + t)];
        }
    }
    r.rowwise() -= r.colwise().mean();
    const Eigen::VectorXd norms = r.colwise().norm();
    for (std::size_t a = 0; a < active.size(); ++a) {
        for (std::size_t c = a + 1; c < active.size(); ++c) {
            const auto ia = static_cast<Eigen::Index>(a);
            const auto ic = static_cast<Eigen::Index>(c);
            const double denom = norms(ia) * norms(ic);
            const double rho = denom > 0.0 ? r.col(ia).dot(r.col(ic)) / denom : 0.0;
            corr(active[a], active[c]) = rho;
            corr(active[c], active[a]) = rho;
        }
    }
    return corr;
}

/// One n_paths x horizon standard-normal matrix per model, jointly Gaussian
/// across models with the residual correlation.
std::vector<Eigen::MatrixXd> correlated_normals(const std::vector<const arima::Model*>& models,
                                                std::size_t n_paths, std::size_t horizon, std::mt19937_64& rng) {
    const Eigen::MatrixXd corr = residual_correlation(models);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(corr);
    Eigen::MatrixXd factor = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    for (Eigen::Index i = 0; i < factor.rows(); ++i) {
        const double norm = factor.row(i).norm();
        if (norm > 0.0) {
            factor.row(i) /= norm;
        }
    }
    const auto n = static_cast<Eigen::Index>(models.size());
    std::vector<Eigen::MatrixXd> out(models.size(),
                                     Eigen::MatrixXd(static_cast<Eigen::Index>(n_paths), static_cast<Eigen::Index>(horizon)));
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd z(n);
    for (std::size_t p = 0; p < n_paths; ++p) {
        for (std::size_t h = 0; h < horizon; ++h) {
            for (Eigen::Index i = 0; i < n; ++i) {
                z(i) = normal(rng);
            }
            const Eigen::VectorXd x = factor * z;
            for (Eigen::Index i = 0; i < n; ++i) {
                out[static_cast<std::size_t>(i)](static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(h)) = x(i);
            }
        }
    }
    return out;
}

}  // namespace

const IntervalForecasts& IntervalResult::at(Method method) const {
    for (const auto& f : methods) {
        if (f.method == method) {
            return f;
        }
    }
    throw std::out_of_range("no intervals for method " + std::string(to_string(method)));
}

IntervalResult interval_forecasts(const Panel& train, std::size_t horizon, std::span<const Method> methods,
                                  const ModelingOptions& modeling, const IntervalOptions& options,
                                  const Eigen::MatrixXd& holdout_bottom_exposures) {
    validate(train, horizon, methods, options, holdout_bottom_exposures);
    const auto& hierarchy = train.hierarchy();
    const std::size_t m = hierarchy.size();
    const std::size_t mk = hierarchy.bottom_count();
    const std::size_t offset = hierarchy.bottom_offset();
    const auto H = static_cast<Eigen::Index>(horizon);
    const auto P = static_cast<Eigen::Index>(options.paths);

    const bool all_rates = std::any_of(methods.begin(), methods.end(),
                                       [](Method x) { return x == Method::base || x == Method::ols; });
    const bool needs_s = std::any_of(methods.begin(), methods.end(), [](Method x) { return x != Method::base; });
    const bool simulate_exposures = needs_s && options.s_mode == SMode::forecast;

    std::vector<MebootPlan> plans;
    plans.reserve(m + mk);
    for (std::size_t j = 0; j < m; ++j) {
        plans.emplace_back(train.node(j).rate);
    }
    for (std::size_t k = 0; k < mk; ++k) {
        const auto& e = train.node(offset + k).exposure;
        std::vector<double> logged(e.size());
        std::transform(e.begin(), e.end(), logged.begin(), [](double v) { return std::log(v); });
        plans.emplace_back(logged);
    }

    std::vector<SummingMatrix> holdout_s;
    if (needs_s && options.s_mode == SMode::holdout) {
        for (Eigen::Index j = 0; j < H; ++j) {
            const Eigen::VectorXd e = holdout_bottom_exposures.col(j);
            holdout_s.push_back(summing_matrix_rates(hierarchy, std::span<const double>(e.data(), e.size()),
                                                     static_cast<std::size_t>(j + 1)));
        }
    }

    std::vector<ReplicateBounds> slots(options.replicates);
    stats::parallel_for(options.replicates, options.threads, [&](std::size_t b) {
        const std::uint64_t rep_seed = stats::replicate_seed(options.seed, b);
        std::mt19937_64 rng(rep_seed);
        const auto replicate = meboot_panel(plans, rng);

        std::vector<Eigen::MatrixXd> rate_paths(m);
        std::vector<Eigen::MatrixXd> exposure_paths(mk);
        try {
            std::vector<arima::Model> rate_models;
            for (std::size_t j = all_rates ? 0 : offset; j < m; ++j) {
                rate_models.push_back(fit_rate_model(replicate[j], modeling));
            }
            std::vector<arima::Model> exposure_models;
            if (simulate_exposures) {
                for (std::size_t k = 0; k < mk; ++k) {
                    exposure_models.push_back(arima::auto_fit(replicate[m + k], modeling.exposure_bounds));
                }
            }
            auto pointers = [](const std::vector<arima::Model>& models) {
                std::vector<const arima::Model*> out;
                for (const auto& model : models) {
                    out.push_back(&model);
                }
                return out;
            };
            std::mt19937_64 rate_rng(stats::stream_seed(rep_seed, 0));
            const auto rate_z = correlated_normals(pointers(rate_models), options.paths, horizon, rate_rng);
            const std::size_t first = all_rates ? 0 : offset;
            for (std::size_t i = 0; i < rate_models.size(); ++i) {
                rate_paths[first + i] = arima::simulate_paths(rate_models[i], rate_z[i]);
                if (modeling.log_rates) {
                    rate_paths[first + i] = rate_paths[first + i].array().exp().matrix();
                }
            }
            if (simulate_exposures) {
                std::mt19937_64 exposure_rng(stats::stream_seed(rep_seed, 1));
                const auto exposure_z = correlated_normals(pointers(exposure_models), options.paths, horizon,
                                                           exposure_rng);
                for (std::size_t k = 0; k < mk; ++k) {
                    exposure_paths[k] = arima::simulate_paths(exposure_models[k], exposure_z[k]).array().exp().matrix();
                }
            }
        } catch (const std::exception& e) {
            slots[b].failure = e.what();
            return;
        }

        const double lo_prob = options.alpha / 2.0;
        const double hi_prob = 1.0 - options.alpha / 2.0;
        std::vector<double> bottom_exposure(mk);
        std::vector<double> cell(options.paths);
        for (Method method : methods) {
            Eigen::MatrixXd lower(static_cast<Eigen::Index>(m), H);
            Eigen::MatrixXd upper(static_cast<Eigen::Index>(m), H);
            for (Eigen::Index hh = 0; hh < H; ++hh) {
                std::optional<Reconciler> fixed;
                if (method == Method::ols && !holdout_s.empty()) {
                    fixed.emplace(method, holdout_s[static_cast<std::size_t>(hh)]);
                }
                Eigen::MatrixXd values(static_cast<Eigen::Index>(m), P);
                Eigen::VectorXd base(static_cast<Eigen::Index>(m));
                for (Eigen::Index p = 0; p < P; ++p) {
                    for (std::size_t j = 0; j < m; ++j) {
                        base(static_cast<Eigen::Index>(j)) = rate_paths[j].size() > 0 ? rate_paths[j](p, hh) : 0.0;
                    }
                    if (method == Method::base) {
                        values.col(p) = base;
                        continue;
                    }
                    std::optional<SummingMatrix> path_s;
                    if (holdout_s.empty()) {
                        for (std::size_t k = 0; k < mk; ++k) {
                            bottom_exposure[k] = exposure_paths[k](p, hh);
                        }
                        path_s = summing_matrix_rates(hierarchy, bottom_exposure, static_cast<std::size_t>(hh + 1));
                    }
                    const SummingMatrix& S = path_s ? *path_s : holdout_s[static_cast<std::size_t>(hh)];
                    if (method == Method::bottom_up) {
                        values.col(p) = S.weights * base.tail(static_cast<Eigen::Index>(mk));
                    } else if (fixed) {
                        values.col(p) = fixed->apply(base);
                    } else {
                        values.col(p) = ols_combine(S, std::span<const double>(base.data(), base.size())).values;
                    }
                }
                for (std::size_t j = 0; j < m; ++j) {
                    const auto row = static_cast<Eigen::Index>(j);
                    for (Eigen::Index p = 0; p < P; ++p) {
                        cell[static_cast<std::size_t>(p)] = values(row, p);
                    }
                    std::sort(cell.begin(), cell.end());
                    lower(row, hh) = stats::quantile_sorted(cell, lo_prob);
                    upper(row, hh) = stats::quantile_sorted(cell, hi_prob);
                }
            }
            slots[b].lower.push_back(std::move(lower));
            slots[b].upper.push_back(std::move(upper));
        }
    });

    IntervalResult result;
    result.alpha = options.alpha;
    result.replicates = options.replicates;
    result.paths = options.paths;
    for (Method method : methods) {
        result.methods.push_back({method, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), H),
                                  Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), H)});
    }
    std::size_t used = 0;
    for (std::size_t b = 0; b < slots.size(); ++b) {
        if (!slots[b].failure.empty()) {
            ++result.skipped;
            result.warnings.push_back("bootstrap replicate " + std::to_string(b) + " skipped: " + slots[b].failure);
            continue;
        }
        ++used;
        for (std::size_t i = 0; i < methods.size(); ++i) {
            result.methods[i].lower += slots[b].lower[i];
            result.methods[i].upper += slots[b].upper[i];
        }
    }
    const double limit = options.max_skip_fraction * static_cast<double>(options.replicates);
    if (used == 0 || static_cast<double>(result.skipped) > limit) {
        throw std::runtime_error(std::to_string(result.skipped) + " of " + std::to_string(options.replicates) +
                                 " bootstrap replicates failed");
    }
    for (auto& f : result.methods) {
        f.lower /= static_cast<double>(used);
        f.upper /= static_cast<double>(used);
    }
    return result;
}

}  // namespace gts::boot
