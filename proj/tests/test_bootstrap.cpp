#include <catch2/catch_amalgamated.hpp>

#include "gts/meboot.hpp"
#include "gts/stats.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace gts;
using namespace gts::boot;

TEST_CASE("Interval means and limits on a small example", "[meboot]") {
    const std::vector<double> x{12.0, 4.0, 36.0, 8.0, 20.0};
    const MebootPlan plan(x);
    REQUIRE(plan.sorted() == std::vector<double>{4.0, 8.0, 12.0, 20.0, 36.0});
    REQUIRE(plan.order() == std::vector<std::size_t>{1, 3, 0, 4, 2});
    const auto& m = plan.interval_means();
    REQUIRE(m[0] == 0.75 * 4.0 + 0.25 * 8.0);
    REQUIRE(m[1] == 0.25 * 4.0 + 0.5 * 8.0 + 0.25 * 12.0);
    REQUIRE(m[4] == 0.25 * 20.0 + 0.75 * 36.0);
    double total = 0.0;
    for (double v : m) {
        total += v;
    }
    REQUIRE(total == Catch::Approx(80.0));

    // |successive differences| = 8, 32, 28, 12; no trimming at n - 1 = 4.
    REQUIRE(plan.trimmed_deviation() == Catch::Approx(20.0));
    const auto& z = plan.limits();
    REQUIRE(z.size() == 6);
    REQUIRE(z[0] == Catch::Approx(-16.0));
    REQUIRE(z[1] == 6.0);
    REQUIRE(z[4] == 28.0);
    REQUIRE(z[5] == Catch::Approx(56.0));
}

TEST_CASE("Quantile function covers the support monotonically", "[meboot]") {
    std::mt19937_64 rng(2);
    const auto x = test::simulate_ar1(0.5, 10.0, 30, rng);
    const MebootPlan plan(x);
    REQUIRE(plan.quantile(0.0) == Catch::Approx(plan.limits().front()));
    REQUIRE(plan.quantile(1.0) == Catch::Approx(plan.limits().back()));
    double prev = plan.quantile(0.0);
    for (int i = 1; i <= 1000; ++i) {
        const double q = plan.quantile(i / 1000.0);
        REQUIRE(q >= prev - 1e-12);
        prev = q;
    }
    const std::size_t n = x.size();
    for (std::size_t k = 1; k < n; ++k) {
        REQUIRE(plan.quantile(static_cast<double>(k) / static_cast<double>(n)) == Catch::Approx(plan.limits()[k]));
    }
}

TEST_CASE("Each interval's density has its prescribed mean", "[meboot]") {
    const std::vector<double> x{3.0, 1.0, 4.0, 1.5, 5.0, 9.0, 2.0, 6.0};
    const MebootPlan plan(x);
    const std::size_t n = plan.size();
    const int grid = 20000;
    for (std::size_t k = 0; k < n; ++k) {
        double acc = 0.0;
        for (int i = 0; i < grid; ++i) {
            const double u = (static_cast<double>(k) + (i + 0.5) / grid) / static_cast<double>(n);
            acc += plan.quantile(u);
        }
        REQUIRE(acc / grid == Catch::Approx(plan.interval_means()[k]).epsilon(1e-5));
    }
}

TEST_CASE("Replicates stay in range, preserve ranks and average to the mean", "[meboot]") {
    std::mt19937_64 data_rng(4);
    const auto x = test::random_walk(50, data_rng);
    const MebootPlan plan(x);
    std::mt19937_64 rng(9);
    double grand = 0.0;
    const int reps = 400;
    for (int b = 0; b < reps; ++b) {
        const auto r = meboot_replicate(x, rng);
        REQUIRE(r.size() == x.size());
        for (double v : r) {
            REQUIRE(v >= plan.limits().front() - 1e-12);
            REQUIRE(v <= plan.limits().back() + 1e-12);
        }
        for (std::size_t i = 1; i < x.size(); ++i) {
            const auto a = plan.order()[i - 1];
            const auto c = plan.order()[i];
            REQUIRE(r[a] <= r[c]);
        }
        grand += stats::mean(r);
    }
    grand /= reps;
    const double spread = plan.sorted().back() - plan.sorted().front();
    REQUIRE(std::abs(grand - stats::mean(x)) < 0.02 * spread);
}

TEST_CASE("Constant and tied series", "[meboot]") {
    const std::vector<double> constant(12, 0.7);
    std::mt19937_64 rng(1);
    REQUIRE(meboot_replicate(constant, rng) == constant);
    const std::vector<double> ties{2.0, 1.0, 2.0, 1.0, 3.0, 2.0};
    const MebootPlan plan(ties);
    REQUIRE(plan.order() == std::vector<std::size_t>{1, 3, 0, 2, 5, 4});
    REQUIRE_THROWS_AS(MebootPlan(std::vector<double>{1.0, 2.0, 3.0}), std::invalid_argument);
}

TEST_CASE("Panel replicates share uniforms across series", "[meboot]") {
    std::vector<std::vector<double>> panel{{1.0, 3.0, 2.0, 5.0, 4.0}, {10.0, 30.0, 20.0, 50.0, 40.0}};
    std::mt19937_64 rng(6);
    const auto r = meboot_panel(panel, rng);
    for (std::size_t t = 0; t < 5; ++t) {
        REQUIRE(r[1][t] == Catch::Approx(10.0 * r[0][t]));
    }
    panel[1].pop_back();
    REQUIRE_THROWS_AS(meboot_panel(panel, rng), std::invalid_argument);
}

TEST_CASE("Replicates are deterministic given the seed", "[meboot]") {
    const std::vector<double> x{5.0, 3.0, 8.0, 1.0, 9.0, 2.0, 7.0};
    std::mt19937_64 a(11);
    std::mt19937_64 b(11);
    REQUIRE(meboot_replicate(x, a) == meboot_replicate(x, b));
}
