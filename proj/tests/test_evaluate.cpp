#include <catch2/catch_amalgamated.hpp>

#include "gts/evaluate.hpp"
#include "gts/intervals.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace gts;
using namespace gts::eval;

TEST_CASE("Rolling plan counts", "[evaluate]") {
    const RollingPlan plan(51, 71);
    REQUIRE(plan.horizon() == 20);
    REQUIRE(plan.origin_count() == 20);
    REQUIRE(plan.origin(0) == 51);
    REQUIRE(plan.horizon_at(19) == 1);
    for (std::size_t h = 1; h <= 20; ++h) {
        REQUIRE(plan.forecast_count(h) == 21 - h);
    }
    REQUIRE(plan.forecast_count(21) == 0);
    REQUIRE_THROWS_AS(RollingPlan(5, 5), std::invalid_argument);
    REQUIRE_THROWS_AS(RollingPlan(0, 5), std::invalid_argument);
}

TEST_CASE("Interval score worked values", "[evaluate]") {
    REQUIRE(interval_score(1.0, 2.0, 1.5, 0.2) == Catch::Approx(1.0));
    REQUIRE(interval_score(1.0, 2.0, 2.5, 0.2) == Catch::Approx(6.0));
    REQUIRE(interval_score(1.0, 2.0, 0.9, 0.2) == Catch::Approx(2.0));
    REQUIRE(interval_score(1.0, 2.0, 2.0, 0.2) == Catch::Approx(1.0));
    REQUIRE_THROWS_AS(interval_score(2.0, 1.0, 1.5, 0.2), std::invalid_argument);
    REQUIRE_THROWS_AS(interval_score(1.0, 2.0, 1.5, 1.0), std::invalid_argument);
}

TEST_CASE("Point scores on a hand-computed plan", "[evaluate]") {
    const RollingPlan plan(2, 4);
    Eigen::MatrixXd actual(4, 1);
    actual << 0.0, 0.0, 1.0, 2.0;
    std::vector<Eigen::MatrixXd> fc(2);
    fc[0].resize(1, 2);
    fc[0] << 1.5, 1.0;
    fc[1].resize(1, 1);
    fc[1] << 3.0;
    const auto s = point_scores(fc, actual, plan);
    // h = 1 errors: -0.5 and -1; h = 2 error: 1.
    REQUIRE(s.mfe(0, 0) == Catch::Approx(-0.75));
    REQUIRE(s.mafe(0, 0) == Catch::Approx(0.75));
    REQUIRE(s.rmsfe(0, 0) == Catch::Approx(std::sqrt(0.625)));
    REQUIRE(s.mfe(0, 1) == Catch::Approx(1.0));
    REQUIRE(s.counts(0, 0) == 2);
    REQUIRE(s.counts(0, 1) == 1);

    fc[1](0, 0) = std::nan("");
    const auto skip = point_scores(fc, actual, plan);
    REQUIRE(skip.counts(0, 0) == 1);
    REQUIRE(skip.mfe(0, 0) == Catch::Approx(-0.5));

    fc.pop_back();
    REQUIRE_THROWS_AS(point_scores(fc, actual, plan), std::invalid_argument);
}

TEST_CASE("Level tables average within levels", "[evaluate]") {
    const auto h = GroupedHierarchy::build({{"sex", {"F", "M"}}});
    Eigen::MatrixXd by_series(3, 3);
    by_series << 1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 4.0, std::nan(""), 10.0;
    const auto t = level_table(h, by_series, "mafe");
    REQUIRE(t.levels == std::vector<std::string>{"Total", "sex"});
    REQUIRE(t.values(0, 1) == Catch::Approx(3.0));
    REQUIRE(t.values(1, 1) == Catch::Approx(4.0));
    REQUIRE(t.values(2, 1) == Catch::Approx(8.0));
    REQUIRE(t.mean(0) == Catch::Approx(2.0));
    REQUIRE(t.median(1) == Catch::Approx(4.0));
}

TEST_CASE("Rolling evaluation on a small panel", "[evaluate]") {
    const auto h = test::two_attribute(2, 2);
    std::mt19937_64 rng(8);
    const auto panel = test::random_panel(h, 34, rng);
    RollingOptions opt;
    opt.modeling.rate_bounds = arima::OrderBounds{1, 1, 1};
    opt.modeling.exposure_bounds = arima::exposure_bounds(arima::OrderBounds{1, 1, 0});
    const RollingPlan plan(30, 34);
    const auto res = run_rolling(panel, plan, opt);
    REQUIRE(res.methods.size() == 4);
    REQUIRE(res.base_forecasts.size() == 4);
    const auto& bu = res.at(Method::bottom_up);
    REQUIRE(bu.mafe.values.rows() == 4);
    REQUIRE(bu.mafe.values.cols() == 4);
    for (std::size_t h1 = 1; h1 <= 4; ++h1) {
        REQUIRE(bu.series.counts(0, static_cast<Eigen::Index>(h1 - 1)) == static_cast<int>(plan.forecast_count(h1)));
    }
    // Base and bottom-up share the bottom-level forecasts.
    const auto& base = res.at(Method::base);
    REQUIRE(base.series.mafe.bottomRows(4) == bu.series.mafe.bottomRows(4));

    opt.threads = 2;
    const auto again = run_rolling(panel, plan, opt);
    REQUIRE(again.base_hash == res.base_hash);
}

TEST_CASE("Bootstrap intervals bracket point forecasts", "[evaluate][intervals]") {
    const auto h = GroupedHierarchy::build({{"sex", {"F", "M"}}});
    std::mt19937_64 rng(12);
    const auto panel = test::random_panel(h, 30, rng);
    ModelingOptions modeling;
    modeling.rate_bounds = arima::OrderBounds{1, 1, 1};
    modeling.exposure_bounds = arima::exposure_bounds(arima::OrderBounds{0, 1, 0});
    boot::IntervalOptions io;
    io.replicates = 8;
    io.paths = 30;
    io.seed = 4;
    const std::vector<Method> methods{Method::base, Method::bottom_up, Method::ols};
    const auto r = boot::interval_forecasts(panel, 3, methods, modeling, io);
    REQUIRE(r.methods.size() == 3);
    for (const auto& f : r.methods) {
        REQUIRE((f.upper.array() >= f.lower.array()).all());
    }
    REQUIRE(r.at(Method::base).lower.bottomRows(2) == r.at(Method::bottom_up).lower.bottomRows(2));
    io.threads = 3;
    const auto r2 = boot::interval_forecasts(panel, 3, methods, modeling, io);
    REQUIRE(r2.at(Method::ols).upper == r.at(Method::ols).upper);
    const std::vector<Method> gls{Method::gls};
    REQUIRE_THROWS_AS(boot::interval_forecasts(panel, 3, gls, modeling, io), std::invalid_argument);
}
