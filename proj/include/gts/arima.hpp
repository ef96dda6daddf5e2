#pragma once

#include "gts/kpss.hpp"

#include <Eigen/Dense>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gts::arima {

struct Order {
    int p = 0;
    int d = 0;
    int q = 0;

    auto operator<=>(const Order&) const = default;
};

[[nodiscard]] std::string to_string(const Order& order);

/// Search space and defaults for automatic order selection.
struct OrderBounds {
    int max_p = 5;
    int max_d = 2;
    int max_q = 5;
    /// When d == 1, also search models with a drift term. Off for rates;
    /// exposure forecasting turns it on.
    bool allow_drift = false;
    /// Minimum series length after differencing.
    std::size_t min_length = 20;
};

/**
 * @brief Fitted ARIMA(p,d,q) model
 *   (1 - phi_1 B - ... - phi_p B^p)(1 - B)^d x_t = gamma + (1 + theta_1 B + ... + theta_q B^q) w_t.
 *
 * The mean term is stored as the mean of the d-times differenced series;
 * intercept() converts it to gamma. A model with sigma2 == 0 is
 * deterministic: forecasts are exact and simulated paths equal the mean path.
 */
struct Model {
    Order order;
    std::vector<double> ar;
    std::vector<double> ma;
    bool has_mean = false;
    double mean = 0.0;
    double sigma2 = 0.0;
    /// One-step prediction errors of the differenced series.
    std::vector<double> residuals;
    double loglik = 0.0;
    double aicc = 0.0;
    std::size_t n_effective = 0;
    int iterations = 0;

    /// Last d observations of the original series.
    std::vector<double> tail;
    /// Predicted state of the mean-removed differenced process after the
    /// last observation.
    std::vector<double> state;

    [[nodiscard]] double intercept() const;
    /// p + q + mean term + innovation variance.
    [[nodiscard]] int parameter_count() const;
    [[nodiscard]] bool deterministic() const { return sigma2 == 0.0; }
};

/// Raised when a candidate cannot be estimated; carries best-so-far diagnostics.
class FitError : public std::runtime_error {
public:
    FitError(const std::string& what, double best_loglik = 0.0, int iterations = 0)
        : std::runtime_error(what), best_loglik_(best_loglik), iterations_(iterations) {}

    [[nodiscard]] double best_loglik() const { return best_loglik_; }
    [[nodiscard]] int iterations() const { return iterations_; }

private:
    double best_loglik_;
    int iterations_;
};

/// AICc = -2 loglik + 2k + 2k(k+1) / (n - k - 1); +inf when n - k - 1 <= 0.
[[nodiscard]] double aicc(double loglik, int k, std::size_t n_effective);

/**
 * @brief Exact Gaussian maximum likelihood fit of a fixed order.
 *
 * The likelihood of the differenced series comes from a Kalman filter
 * started at the stationary state covariance. Parameters are optimised on
 * partial-autocorrelation scales so that every iterate is stationary and
 * invertible. Throws std::invalid_argument when n - d <= p + q + 2 and
 * FitError on non-convergence or roots within 1 + 1e-6 of the unit circle.
 */
[[nodiscard]] Model fit(std::span<const double> x, Order order, bool include_mean);

/// Convenience: the mean term is included when d == 0.
[[nodiscard]] inline Model fit(std::span<const double> x, Order order) {
    return fit(x, order, order.d == 0);
}

struct Candidate {
    Order order;
    bool has_mean = false;
    std::optional<double> aicc;
    std::string failure;
};

struct AutoFitResult {
    Model model;
    std::vector<Candidate> candidates;
};

/**
 * @brief Automatic order selection.
 *
 * d from select_d, then an exhaustive search over p <= max_p, q <= max_q
 * returning the minimum-AICc model; ties go to fewer parameters, then lower p.
 * A series whose differenced form is constant yields a deterministic model.
 * Throws std::invalid_argument when the differenced series is shorter than
 * bounds.min_length and FitError when every candidate fails.
 */
[[nodiscard]] AutoFitResult auto_fit_detailed(std::span<const double> x, const OrderBounds& bounds = {});

[[nodiscard]] inline Model auto_fit(std::span<const double> x, const OrderBounds& bounds = {}) {
    return auto_fit_detailed(x, bounds).model;
}

struct ForecastDistribution {
    std::vector<double> mean;
    std::vector<double> variance;
    double one_step_variance = 0.0;
};

/// psi-weights of the integrated model, psi_0 = 1.
[[nodiscard]] std::vector<double> psi_weights(const Model& model, std::size_t count);

/// Point forecasts via the model recursion and variances sigma2 * sum psi_j^2.
[[nodiscard]] ForecastDistribution forecast(const Model& model, std::size_t horizon);

/**
 * @brief n_paths x horizon matrix of future sample paths conditional on the
 * observed history, with Gaussian innovations.
 *
 * Each path equals the forecast mean plus sum_{j<h} psi_j * eps_{h-j}.
 */
[[nodiscard]] Eigen::MatrixXd simulate_paths(const Model& model, std::size_t horizon,
                                             std::size_t n_paths, std::mt19937_64& rng);

[[nodiscard]] Eigen::MatrixXd simulate_paths(const Model& model, std::size_t horizon,
                                             std::size_t n_paths, std::uint64_t seed);

/// Paths driven by caller-supplied standard-normal draws (n_paths x horizon),
/// e.g. draws correlated across series.
[[nodiscard]] Eigen::MatrixXd simulate_paths(const Model& model, const Eigen::MatrixXd& standard_normals);

/// Roots of 1 + c_1 z + ... + c_k z^k all have modulus > 1 + margin.
[[nodiscard]] bool roots_outside_unit_circle(std::span<const double> coefficients, double margin = 1e-6);

/// Order bounds used for exposure forecasting: default grid with drift allowed.
[[nodiscard]] OrderBounds exposure_bounds(OrderBounds bounds = {});

struct ExposureForecast {
    /// Model on the log scale.
    Model model;
    /// exp of the log-scale point forecasts.
    std::vector<double> mean;
};

/// auto_fit on log(exposure) and back-transformed point forecasts.
/// Throws std::domain_error on a nonpositive exposure.
[[nodiscard]] ExposureForecast fit_forecast_log_exposure(std::span<const double> exposure,
                                                         std::size_t horizon,
                                                         const OrderBounds& bounds = exposure_bounds());

/// Simulated exposure paths: log-scale paths exponentiated per path.
[[nodiscard]] Eigen::MatrixXd simulate_exposure_paths(const Model& log_model, std::size_t horizon,
                                                      std::size_t n_paths, std::mt19937_64& rng);

}  // namespace gts::arima
