#include "gts/optimize.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace gts::optim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class Gradient>
BfgsResult bfgs(const Objective& f, const Gradient& gradient, Eigen::VectorXd x0, const BfgsOptions& options,
                BfgsResult& result) {
    const Eigen::Index k = x0.size();
    auto eval = [&](const Eigen::VectorXd& x) {
        ++result.evaluations;
        const double v = f(x);
        return std::isfinite(v) ? v : kInf;
    };

    Eigen::VectorXd x = std::move(x0);
    double fx = eval(x);
    result.x = x;
    result.value = fx;
    if (k == 0 || !std::isfinite(fx)) {
        result.converged = k == 0 && std::isfinite(fx);
        return result;
    }

    Eigen::MatrixXd inv_hessian = Eigen::MatrixXd::Identity(k, k);
    Eigen::VectorXd g = gradient(x);
    bool reset_once = false;

    for (int iter = 1; iter <= options.max_iterations; ++iter) {
        result.iterations = iter;
        Eigen::VectorXd dir = -inv_hessian * g;
        double slope = g.dot(dir);
        if (!(slope < 0.0)) {
            inv_hessian.setIdentity();
            dir = -g;
            slope = g.dot(dir);
        }
        if (g.lpNorm<Eigen::Infinity>() < 1e-12) {
            result.converged = true;
            break;
        }

        // Backtracking line search with the Armijo condition.
        double step = 1.0;
        Eigen::VectorXd x_new;
        double f_new = kInf;
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls) {
            x_new = x + step * dir;
            f_new = eval(x_new);
            if (f_new <= fx + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            if (!reset_once) {
                reset_once = true;
                inv_hessian.setIdentity();
                continue;
            }
            // No descent is available at the gradient resolution.
            result.converged = true;
            break;
        }
        reset_once = false;

        const double change = fx - f_new;
        const Eigen::VectorXd g_new = gradient(x_new);
        const Eigen::VectorXd s = x_new - x;
        const Eigen::VectorXd y = g_new - g;
        x = x_new;
        fx = f_new;
        g = g_new;
        result.x = x;
        result.value = fx;

        if (change <= options.tolerance * (1.0 + std::abs(fx))) {
            result.converged = true;
            break;
        }

        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(k, k);
            inv_hessian = (eye - rho * s * y.transpose()) * inv_hessian *
                              (eye - rho * y * s.transpose()) +
                          rho * s * s.transpose();
        }
    }
    return result;
}

}  // namespace

BfgsResult minimize_bfgs(const Objective& f, Eigen::VectorXd x0, const BfgsOptions& options) {
    BfgsResult result;
    const Eigen::Index k = x0.size();
    auto gradient = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd g(k);
        Eigen::VectorXd probe = x;
        for (Eigen::Index i = 0; i < k; ++i) {
            const double h = options.gradient_step * std::max(1.0, std::abs(x(i)));
            probe(i) = x(i) + h;
            ++result.evaluations;
            const double up = f(probe);
            probe(i) = x(i) - h;
            ++result.evaluations;
            const double down = f(probe);
            probe(i) = x(i);
            g(i) = (up - down) / (2.0 * h);
            if (!std::isfinite(g(i))) {
                g(i) = 0.0;
            }
        }
        return g;
    };
    return bfgs(f, gradient, std::move(x0), options, result);
}

BfgsResult minimize_bfgs(const Objective& f, const ObjectiveGradient& f_gradient, Eigen::VectorXd x0,
                         const BfgsOptions& options) {
    BfgsResult result;
    auto gradient = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd g(x.size());
        ++result.evaluations;
        f_gradient(x, g);
        for (Eigen::Index i = 0; i < g.size(); ++i) {
            if (!std::isfinite(g(i))) {
                g(i) = 0.0;
            }
        }
        return g;
    };
    return bfgs(f, gradient, std::move(x0), options, result);
}

}  // namespace gts::optim
