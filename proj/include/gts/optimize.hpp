#pragma once

#include <Eigen/Dense>

#include <functional>

namespace gts::optim {

struct BfgsOptions {
    int max_iterations = 500;
    /// Stop when an iteration changes the objective by less than
    /// tolerance * (1 + |f|).
    double tolerance = 1e-8;
    /// Relative step of the central-difference gradient.
    double gradient_step = 1e-6;
};

struct BfgsResult {
    Eigen::VectorXd x;
    double value = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

using Objective = std::function<double(const Eigen::VectorXd&)>;
/// Returns f(x) and writes the gradient at x.
using ObjectiveGradient = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

/// Quasi-Newton minimisation with a numerical gradient and backtracking
/// line search. Non-finite objective values are treated as +infinity.
[[nodiscard]] BfgsResult minimize_bfgs(const Objective& f, Eigen::VectorXd x0, const BfgsOptions& options = {});

/// As above with an exact gradient; `f` serves the line search.
[[nodiscard]] BfgsResult minimize_bfgs(const Objective& f, const ObjectiveGradient& f_gradient,
                                       Eigen::VectorXd x0, const BfgsOptions& options = {});

}  // namespace gts::optim
