#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>

namespace sysrisk::optim {

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct Options {
    int max_iterations = 500;
    /// Stop when the objective improves by less than this (relative to 1 + |f|).
    double f_tolerance = 1e-8;
    double g_tolerance = 1e-6;
};

struct Result {
    Eigen::VectorXd x;
    double value = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
    std::string message;
};

/// Central-difference gradient; non-finite objective values propagate.
Eigen::VectorXd numeric_gradient(const Objective& f, const Eigen::VectorXd& x, double rel_step = 6e-6);

/// Symmetric central-difference Hessian with per-coordinate steps `step`.
Eigen::MatrixXd numeric_hessian(const Objective& f, const Eigen::VectorXd& x, const Eigen::VectorXd& step);

/// Unconstrained minimization by BFGS with a backtracking Armijo line search.
/// Non-finite objective values are treated as +inf and rejected by the line search.
Result minimize_bfgs(const Objective& f, const Eigen::VectorXd& x0, const Options& opts = {});

}  // namespace sysrisk::optim
