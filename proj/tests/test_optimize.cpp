#include <catch2/catch_amalgamated.hpp>

#include "../src/dual.hpp"
#include "gts/optimize.hpp"

#include <cmath>

using gts::ad::Dual;

namespace {

template <class T>
T sample_function(const T& x, const T& y) {
    using std::log;
    using std::tanh;
    return log(x * x + 1.0) * tanh(y) / (2.0 - y) + 3.0 * x - x / y;
}

}  // namespace

TEST_CASE("Dual numbers match central differences", "[optimize]") {
    const double x = 0.7;
    const double y = -0.4;
    const auto f = sample_function(Dual<2>::variable(x, 0), Dual<2>::variable(y, 1));
    const double h = 1e-6;
    const double dx = (sample_function(x + h, y) - sample_function(x - h, y)) / (2.0 * h);
    const double dy = (sample_function(x, y + h) - sample_function(x, y - h)) / (2.0 * h);
    CHECK(f.v == sample_function(x, y));
    CHECK(f.d[0] == Catch::Approx(dx).epsilon(1e-7));
    CHECK(f.d[1] == Catch::Approx(dy).epsilon(1e-7));
}

TEST_CASE("BFGS with exact and numerical gradients reaches the Rosenbrock minimum", "[optimize]") {
    const auto rosenbrock = [](const Eigen::VectorXd& v) {
        return 100.0 * std::pow(v(1) - v(0) * v(0), 2) + std::pow(1.0 - v(0), 2);
    };
    const auto with_gradient = [&](const Eigen::VectorXd& v, Eigen::VectorXd& g) {
        g.resize(2);
        g(0) = -400.0 * v(0) * (v(1) - v(0) * v(0)) - 2.0 * (1.0 - v(0));
        g(1) = 200.0 * (v(1) - v(0) * v(0));
        return rosenbrock(v);
    };
    const Eigen::Vector2d start(-1.2, 1.0);
    gts::optim::BfgsOptions options;
    options.tolerance = 1e-14;

    const auto exact = gts::optim::minimize_bfgs(rosenbrock, with_gradient, start, options);
    CHECK(exact.converged);
    CHECK(exact.x(0) == Catch::Approx(1.0).margin(1e-4));
    CHECK(exact.x(1) == Catch::Approx(1.0).margin(1e-4));

    const auto numerical = gts::optim::minimize_bfgs(rosenbrock, start, options);
    CHECK(numerical.converged);
    CHECK(numerical.x(0) == Catch::Approx(1.0).margin(1e-3));
}
