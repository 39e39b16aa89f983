#pragma once

#include <Eigen/Dense>

#include <functional>

namespace kitwpa::detail {

struct LmOptions {
    int max_iterations = 200;     // residual evaluations outside the Jacobian
    double jacobian_step = 1e-7;  // relative; parameters are expected to be O(1)
    double step_tolerance = 1e-10;
    double cost_tolerance = 1e-10;
};

enum class LmStatus { Converged, IterationCap, OutOfBounds };

struct LmResult {
    Eigen::VectorXd params;
    double cost = 0.0;  // 0.5 * sum of squared residuals
    int iterations = 0;
    LmStatus status = LmStatus::IterationCap;
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using BoundsFn = std::function<bool(const Eigen::VectorXd&)>;

// Eigen's MINPACK-style Levenberg-Marquardt with a central-difference
// Jacobian. `in_bounds` is checked on the final iterate.
LmResult levenberg_marquardt(const ResidualFn& residuals, Eigen::VectorXd start,
                             const BoundsFn& in_bounds, const LmOptions& options = {});

}  // namespace kitwpa::detail
