#include <catch2/catch_amalgamated.hpp>

#include "gts/forecast.hpp"
#include "gts/reconcile.hpp"
#include "gts/synthetic.hpp"
#include "oracles.hpp"

#include <cmath>
#include <limits>
#include <random>

using namespace gts;

namespace {

SummingMatrix three_node() {
    SummingMatrix S;
    S.weights.resize(3, 2);
    S.weights << 1, 1, 1, 0, 0, 1;
    return S;
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

TEST_CASE("Method names round trip", "[reconcile]") {
    for (Method m : {Method::base, Method::bottom_up, Method::ols, Method::gls}) {
        REQUIRE(parse_method(to_string(m)) == m);
    }
    REQUIRE(to_string(Method::bottom_up) == "bottom-up");
    REQUIRE_FALSE(parse_method("BU").has_value());
}

TEST_CASE("OLS hand example", "[reconcile]") {
    const std::vector<double> base{10.0, 4.0, 5.0};
    const auto r = ols_combine(three_node(), base);
    REQUIRE(std::abs(r.bottom(0) - 13.0 / 3.0) <= 1e-12);
    REQUIRE(std::abs(r.bottom(1) - 16.0 / 3.0) <= 1e-12);
    REQUIRE(std::abs(r.values(0) - 29.0 / 3.0) <= 1e-12);
}

TEST_CASE("Bottom-up ignores upper levels", "[reconcile]") {
    std::vector<double> base{std::numeric_limits<double>::quiet_NaN(), 4.0, 5.0};
    const auto r = bottom_up(three_node(), base);
    REQUIRE(r.values(0) == 9.0);
    REQUIRE(r.values(1) == 4.0);
    base[2] = std::nan("");
    REQUIRE_THROWS(bottom_up(three_node(), base));
}

TEST_CASE("GLS matches weighted normal equations", "[reconcile]") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.1, 5.0);
    const auto h = synth::australian_hierarchy();
    std::vector<double> e(16);
    for (auto& v : e) {
        v = 100.0 * u(rng);
    }
    const auto S = summing_matrix_rates(h, e);
    for (int rep = 0; rep < 10; ++rep) {
        Eigen::VectorXd y(27);
        Eigen::VectorXd var(27);
        for (Eigen::Index i = 0; i < 27; ++i) {
            y(i) = u(rng);
            var(i) = u(rng);
        }
        const auto r = gls_combine(S, to_std(y), to_std(var));
        const Eigen::VectorXd oracle = test::normal_equations(S.weights, y, var.cwiseInverse());
        REQUIRE((r.bottom - oracle).cwiseAbs().maxCoeff() <= 1e-9);
    }
}

TEST_CASE("GLS rejects bad variances by name", "[reconcile]") {
    const std::vector<double> base{10.0, 4.0, 5.0};
    const std::vector<double> var{1.0, 0.0, 1.0};
    const std::vector<std::string> labels{"T", "F", "M"};
    try {
        (void)gls_combine(three_node(), base, var, labels);
        FAIL("expected an exception");
    } catch (const std::invalid_argument& e) {
        REQUIRE(std::string(e.what()).find("F") != std::string::npos);
    }
    REQUIRE_THROWS_AS(reconcile(Method::gls, three_node(), base), std::invalid_argument);
}

TEST_CASE("Projection identities and Reconciler agreement", "[reconcile]") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    const auto h = synth::australian_hierarchy();
    std::vector<double> e(16);
    for (auto& v : e) {
        v = 50.0 * u(rng);
    }
    const auto S = summing_matrix_rates(h, e);
    std::vector<double> w(27);
    for (auto& v : w) {
        v = u(rng);
    }
    const Eigen::MatrixXd P = projection_matrix(S, w);
    REQUIRE((P * S.weights - Eigen::MatrixXd::Identity(16, 16)).cwiseAbs().maxCoeff() <= 1e-10);
    REQUIRE((S.weights * P * S.weights - S.weights).cwiseAbs().maxCoeff() <= 1e-10);

    std::vector<double> var(27);
    for (std::size_t i = 0; i < 27; ++i) {
        var[i] = 1.0 / w[i];
    }
    Eigen::VectorXd y(27);
    for (Eigen::Index i = 0; i < 27; ++i) {
        y(i) = u(rng);
    }
    for (Method m : {Method::base, Method::bottom_up, Method::ols, Method::gls}) {
        const Reconciler rec(m, S, var);
        const auto direct = reconcile(m, S, to_std(y), var);
        REQUIRE((rec.apply(y) - direct.values).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("Rank-deficient summing matrices are rejected", "[reconcile]") {
    SummingMatrix S;
    S.weights = Eigen::MatrixXd::Zero(3, 2);
    S.weights(0, 0) = 1.0;
    const std::vector<double> base{1.0, 2.0, 3.0};
    REQUIRE_THROWS(ols_combine(S, base));
}

TEST_CASE("Forecast reconciliation per horizon", "[reconcile][forecast]") {
    const auto h = GroupedHierarchy::build({{"sex", {"F", "M"}}});
    BaseForecasts base;
    base.rates.resize(3, 2);
    base.rates << 0.03, 0.03, 0.02, 0.02, 0.04, std::nan("");
    base.one_step_variance = {1.0, 1.0, 1.0};
    Eigen::MatrixXd expo(2, 2);
    expo << 75.0, 75.0, 25.0, 25.0;
    const auto bu = reconcile_forecasts(h, base, Method::bottom_up, SMode::forecast, expo);
    REQUIRE(bu.values(0, 0) == Catch::Approx(0.025));
    REQUIRE(std::isnan(bu.values(0, 1)));
    const auto b = reconcile_forecasts(h, base, Method::base, SMode::forecast, expo);
    REQUIRE(b.values(0, 1) == 0.03);
    REQUIRE(to_string(SMode::holdout) == "holdout");
    REQUIRE(parse_s_mode("forecast") == SMode::forecast);
}
