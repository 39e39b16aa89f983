#include "kitwpa/detail/levenberg_marquardt.hpp"

#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

namespace kitwpa::detail {

namespace {

struct Residuals {
    using Scalar = double;
    enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
    using InputType = Eigen::VectorXd;
    using ValueType = Eigen::VectorXd;
    using JacobianType = Eigen::MatrixXd;

    const ResidualFn* fn = nullptr;
    Eigen::Index n = 0, m = 0;

    Eigen::Index inputs() const { return n; }
    Eigen::Index values() const { return m; }
    int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& out) const {
        out = (*fn)(x);
        return out.allFinite() ? 0 : -1;  // negative aborts the solve
    }
};

}  // namespace

LmResult levenberg_marquardt(const ResidualFn& residuals, Eigen::VectorXd start,
                             const BoundsFn& in_bounds, const LmOptions& options) {
    Residuals f;
    f.fn = &residuals;
    f.n = start.size();
    f.m = residuals(start).size();
    // NumericalDiff steps by sqrt(epsfcn) |x|
    Eigen::NumericalDiff<Residuals, Eigen::Central> diff(f, options.jacobian_step * options.jacobian_step);
    Eigen::LevenbergMarquardt<Eigen::NumericalDiff<Residuals, Eigen::Central>> lm(diff);
    lm.parameters.maxfev = options.max_iterations;
    lm.parameters.xtol = options.step_tolerance;
    lm.parameters.ftol = options.cost_tolerance;

    LmResult out;
    out.params = std::move(start);
    const auto status = lm.minimize(out.params);
    out.iterations = static_cast<int>(lm.nfev);
    out.cost = 0.5 * residuals(out.params).squaredNorm();

    using S = Eigen::LevenbergMarquardtSpace::Status;
    if (status == S::TooManyFunctionEvaluation || status == S::ImproperInputParameters ||
        status == S::UserAsked || !std::isfinite(out.cost)) {
        out.status = LmStatus::IterationCap;
    } else {
        // the tolerance statuses all mean no further progress at working precision
        out.status = LmStatus::Converged;
    }
    if (!in_bounds(out.params)) out.status = LmStatus::OutOfBounds;
    return out;
}

}  // namespace kitwpa::detail
