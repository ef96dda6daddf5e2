#include <catch2/catch_amalgamated.hpp>

#include "gts/arima.hpp"
#include "gts/kpss.hpp"
#include "gts/stats.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace gts;
using namespace gts::arima;

namespace {

Model hand_ar1(double phi, double last, double sigma2) {
    Model m;
    m.order = {1, 0, 0};
    m.ar = {phi};
    m.has_mean = true;
    m.mean = 0.0;
    m.sigma2 = sigma2;
    m.state = {phi * last};
    return m;
}

}  // namespace

TEST_CASE("KPSS statistic matches the direct formula", "[kpss]") {
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 20; ++rep) {
        const auto x = rep % 2 == 0 ? test::simulate_ar1(0.5, 3.0, 60 + rep, rng) : test::random_walk(60 + rep, rng);
        const double mine = kpss_statistic(x);
        REQUIRE(std::abs(mine - test::kpss_oracle(x)) <= 1e-10 * std::max(1.0, mine));
    }
}

TEST_CASE("KPSS lag truncation and edge cases", "[kpss]") {
    REQUIRE(kpss_lags(100) == 4);
    REQUIRE(kpss_lags(51) == 3);
    REQUIRE(kpss_lags(500) == 5);
    const std::vector<double> constant(30, 2.5);
    REQUIRE(kpss_test(constant).statistic == 0.0);
    REQUIRE(kpss_test(constant).stationary);
    REQUIRE_THROWS_AS(kpss_test(std::vector<double>(9, 1.0)), std::invalid_argument);
    std::vector<double> ramp(50);
    for (std::size_t t = 0; t < ramp.size(); ++t) {
        ramp[t] = static_cast<double>(t);
    }
    REQUIRE_FALSE(kpss_test(ramp).stationary);
    REQUIRE(select_d(ramp, 2) == 1);
    REQUIRE(select_d(constant, 2) == 0);
}

TEST_CASE("AICc arithmetic", "[arima]") {
    REQUIRE(aicc(-50.0, 2, 25) == Catch::Approx(100.0 + 4.0 + 12.0 / 22.0).epsilon(1e-14));
    REQUIRE(aicc(-45.0, 3, 25) == Catch::Approx(90.0 + 6.0 + 24.0 / 21.0).epsilon(1e-14));
    REQUIRE(std::isinf(aicc(-1.0, 4, 5)));
}

TEST_CASE("Exact likelihood agrees with a dense covariance oracle", "[arima]") {
    std::mt19937_64 rng(23);
    const auto x = test::simulate_ar1(0.6, 1.0, 80, rng);
    for (const Order order : {Order{1, 0, 0}, Order{0, 0, 1}, Order{1, 0, 1}, Order{2, 0, 2}}) {
        const Model m = fit(x, order);
        const auto [ll, s2] = test::dense_arma_loglik(x, m.ar, m.ma, m.mean);
        CAPTURE(to_string(order));
        REQUIRE(std::abs(m.loglik - ll) <= 1e-6 * std::abs(ll));
        REQUIRE(std::abs(m.sigma2 - s2) <= 1e-8 * s2);
    }
}

TEST_CASE("Hand-built AR(1) forecasts and variances", "[arima]") {
    const Model m = hand_ar1(0.5, 1.0, 1.0);
    const auto fc = forecast(m, 3);
    REQUIRE(fc.mean[0] == Catch::Approx(0.5));
    REQUIRE(fc.mean[1] == Catch::Approx(0.25));
    REQUIRE(fc.mean[2] == Catch::Approx(0.125));
    REQUIRE(fc.variance[0] == Catch::Approx(1.0));
    REQUIRE(fc.variance[1] == Catch::Approx(1.25));
    REQUIRE(fc.variance[2] == Catch::Approx(1.3125));
    REQUIRE_THROWS_AS(forecast(m, 0), std::invalid_argument);
}

TEST_CASE("Random-walk forecasts are flat with linearly growing variance", "[arima]") {
    std::mt19937_64 rng(29);
    const auto x = test::random_walk(120, rng);
    const Model m = fit(x, Order{0, 1, 0});
    const auto fc = forecast(m, 5);
    for (std::size_t h = 0; h < 5; ++h) {
        REQUIRE(fc.mean[h] == Catch::Approx(x.back()));
        REQUIRE(fc.variance[h] == Catch::Approx(static_cast<double>(h + 1) * m.sigma2));
    }
    const auto dx = stats::difference(x, 1);
    double ss = 0.0;
    for (double v : dx) {
        ss += v * v;
    }
    REQUIRE(m.sigma2 == Catch::Approx(ss / static_cast<double>(dx.size())).epsilon(1e-12));
}

TEST_CASE("Simulated paths reproduce forecast moments", "[arima]") {
    const Model m = hand_ar1(0.5, 1.0, 1.0);
    const auto paths = simulate_paths(m, 3, 40000, std::uint64_t{7});
    const auto fc = forecast(m, 3);
    for (Eigen::Index h = 0; h < 3; ++h) {
        const double mean = paths.col(h).mean();
        const double var = (paths.col(h).array() - mean).square().mean();
        REQUIRE(std::abs(mean - fc.mean[static_cast<std::size_t>(h)]) < 0.03);
        REQUIRE(std::abs(var / fc.variance[static_cast<std::size_t>(h)] - 1.0) < 0.05);
    }
    REQUIRE(simulate_paths(m, 3, 5, std::uint64_t{3}) == simulate_paths(m, 3, 5, std::uint64_t{3}));
}

TEST_CASE("Fits are scale equivariant", "[arima]") {
    std::mt19937_64 rng(31);
    const auto x = test::simulate_ar1(0.7, 2.0, 150, rng);
    std::vector<double> y(x.size());
    for (std::size_t t = 0; t < x.size(); ++t) {
        y[t] = 1e-3 * x[t];
    }
    const Model a = fit(x, Order{1, 0, 1});
    const Model b = fit(y, Order{1, 0, 1});
    REQUIRE(std::abs(a.ar[0] - b.ar[0]) < 1e-4);
    REQUIRE(std::abs(a.ma[0] - b.ma[0]) < 1e-4);
    REQUIRE(b.sigma2 == Catch::Approx(1e-6 * a.sigma2).epsilon(1e-4));
}

TEST_CASE("Automatic selection returns the minimum-AICc candidate", "[arima]") {
    std::mt19937_64 rng(37);
    const auto x = test::simulate_ar1(0.7, 0.0, 200, rng);
    const auto res = auto_fit_detailed(x, OrderBounds{3, 2, 3});
    REQUIRE(res.model.order.d == 0);
    for (const auto& c : res.candidates) {
        if (c.aicc) {
            REQUIRE(res.model.aicc <= *c.aicc);
        }
    }
    REQUIRE(res.candidates.size() == 16);
}

TEST_CASE("Constant and linear series give deterministic models", "[arima]") {
    const std::vector<double> constant(30, 0.004);
    const Model c = auto_fit(constant);
    REQUIRE(c.deterministic());
    REQUIRE(forecast(c, 4).mean[3] == Catch::Approx(0.004));
    std::vector<double> line(30);
    for (std::size_t t = 0; t < line.size(); ++t) {
        line[t] = 100.0 + 2.0 * static_cast<double>(t);
    }
    OrderBounds drift;
    drift.allow_drift = true;
    const Model l = auto_fit(line, drift);
    REQUIRE(l.deterministic());
    REQUIRE(forecast(l, 2).mean[1] == Catch::Approx(162.0));
}

TEST_CASE("Input validation", "[arima]") {
    const std::vector<double> shortx{1.0, 2.0, 3.0, 4.0};
    REQUIRE_THROWS_AS(fit(shortx, Order{1, 0, 1}), std::invalid_argument);
    REQUIRE_THROWS_AS(auto_fit(std::vector<double>(15, 1.0)), std::invalid_argument);
    std::vector<double> bad(40, 1.0);
    bad[5] = std::nan("");
    REQUIRE_THROWS_AS(fit(bad, Order{0, 0, 0}), std::invalid_argument);
    REQUIRE(roots_outside_unit_circle(std::vector<double>{-0.5}));
    REQUIRE_FALSE(roots_outside_unit_circle(std::vector<double>{-1.0}));
}

TEST_CASE("Log-exposure forecasts are positive and follow growth", "[arima]") {
    std::vector<double> e(40);
    std::mt19937_64 rng(41);
    std::normal_distribution<double> z(0.0, 0.01);
    double v = std::log(5000.0);
    for (auto& x : e) {
        v += 0.02 + z(rng);
        x = std::exp(v);
    }
    const auto fc = fit_forecast_log_exposure(e, 5);
    for (double m : fc.mean) {
        REQUIRE(m > e.back() * 0.9);
    }
    REQUIRE(fc.mean[4] > fc.mean[0]);
    e[3] = 0.0;
    REQUIRE_THROWS_AS(fit_forecast_log_exposure(e, 5), std::domain_error);
}
