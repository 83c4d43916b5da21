#include "csdsvm/solver.hpp"

#include <cmath>
#include <sstream>

namespace csdsvm {

namespace {

double relative_residual(const Eigen::MatrixXd& system, const Eigen::VectorXd& solution,
                         const Eigen::VectorXd& rhs) {
    return (system * solution - rhs).norm() / std::max(1.0, rhs.norm());
}

[[noreturn]] void fail(const std::string& what, double rcond) {
    std::ostringstream msg;
    msg << what << " (reciprocal condition estimate " << rcond << ")";
    throw NumericalError(msg.str(), rcond);
}

}  // namespace

Eigen::VectorXd pseudo_targets(const Dataset& data, const CensoringModel& cens) {
    Eigen::VectorXd v(data.size());
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        v[i] = data.status()[i] == 1
                   ? 0.0
                   : 1.0 / density_eval(cens, data.times()[i], data.covariate(i));
    }
    return v;
}

DualSolution solve_dual(const Eigen::MatrixXd& gram, const Eigen::VectorXd& targets,
                        double lambda, const FitOptions& options) {
    const Eigen::Index n = gram.rows();
    if (gram.cols() != n || targets.size() != n) {
        throw std::invalid_argument("solve_dual: gram matrix and targets disagree in size");
    }
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("solve_dual: lambda must be positive and finite");
    }
    if (!(options.loss_scale > 0.0) || !std::isfinite(options.loss_scale)) {
        throw std::invalid_argument("solve_dual: loss scale must be positive and finite");
    }
    if (n < 1 || (options.with_intercept && n < 2)) {
        throw std::invalid_argument("solve_dual: need n >= 1, or n >= 2 with an intercept");
    }
    const double ridge = static_cast<double>(n) * lambda / options.loss_scale;

    if (!options.with_intercept) {
        Eigen::MatrixXd system = gram;
        system.diagonal().array() += ridge;
        Eigen::LLT<Eigen::MatrixXd> llt(system);
        if (llt.info() != Eigen::Success) {
            fail("solve_dual: regularized gram matrix is not positive definite", 0.0);
        }
        Eigen::VectorXd alpha = llt.solve(targets);
        const double res = relative_residual(system, alpha, targets);
        if (!(res <= kResidualTolerance)) fail("solve_dual: residual too large", llt.rcond());
        return {std::move(alpha), std::nullopt, res};
    }

    Eigen::MatrixXd system(n + 1, n + 1);
    system.topLeftCorner(n, n) = gram;
    system.topLeftCorner(n, n).diagonal().array() += ridge;
    system.col(n).head(n).setOnes();
    system.row(n).head(n).setOnes();
    system(n, n) = 0.0;
    Eigen::VectorXd rhs(n + 1);
    rhs.head(n) = targets;
    rhs[n] = 0.0;

    Eigen::LDLT<Eigen::MatrixXd> ldlt(system);
    if (ldlt.info() != Eigen::Success) {
        fail("solve_dual: bordered system factorization failed", 0.0);
    }
    Eigen::VectorXd solution = ldlt.solve(rhs);
    double res = relative_residual(system, solution, rhs);
    if (!(res <= kResidualTolerance)) {
        // One step of iterative refinement before giving up.
        solution += ldlt.solve(rhs - system * solution);
        res = relative_residual(system, solution, rhs);
    }
    if (!(res <= kResidualTolerance) || !solution.allFinite()) {
        fail("solve_dual: bordered system is numerically singular", ldlt.rcond());
    }
    return {solution.head(n), solution[n], res};
}

FittedModel fit(const Dataset& data, const KernelSpec& kernel, double lambda,
                const CensoringModel& cens, const FitOptions& options) {
    const Eigen::MatrixXd gram = gram_matrix(kernel, data.covariates());
    const Eigen::VectorXd v = pseudo_targets(data, cens);
    DualSolution sol = solve_dual(gram, v, lambda, options);
    return FittedModel{kernel,       data.covariates(), std::move(sol.alpha), sol.intercept,
                       lambda,       cens,              data.tau(),           sol.relative_residual};
}

Eigen::VectorXd predict(const FittedModel& model, const Eigen::MatrixXd& query) {
    if (query.rows() > 0 && query.cols() != model.dim()) {
        throw std::invalid_argument("predict: query dimension " + std::to_string(query.cols()) +
                                    " does not match model dimension " +
                                    std::to_string(model.dim()));
    }
    Eigen::VectorXd f = cross_kernel(model.kernel, model.support, query) * model.alpha;
    if (model.intercept) f.array() += *model.intercept;
    return f;
}

double censored_risk_from_targets(const Eigen::VectorXd& predictions,
                                  const Eigen::VectorXd& targets, const Eigen::VectorXd& times,
                                  bool shift) {
    const Eigen::Index n = targets.size();
    if (predictions.size() != n || times.size() != n) {
        throw std::invalid_argument("censored risk: predictions length " +
                                    std::to_string(predictions.size()) +
                                    " does not match data length " + std::to_string(n));
    }
    if (n == 0) throw std::invalid_argument("censored risk: empty data");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double f = predictions[i];
        sum += 2.0 * targets[i] * (times[i] - f) + f * f;
    }
    double risk = sum / static_cast<double>(n);
    if (shift) risk += targets.array().square().maxCoeff();
    return risk;
}

double censored_empirical_risk(const Eigen::VectorXd& predictions, const Dataset& data,
                               const CensoringModel& cens, bool shift) {
    if (predictions.size() != data.size()) {
        throw std::invalid_argument("censored risk: predictions length " +
                                    std::to_string(predictions.size()) +
                                    " does not match data length " +
                                    std::to_string(data.size()));
    }
    return censored_risk_from_targets(predictions, pseudo_targets(data, cens), data.times(),
                                      shift);
}

double regularized_objective(const Eigen::VectorXd& alpha, std::optional<double> intercept,
                             const Dataset& data, const KernelSpec& kernel, double lambda,
                             const CensoringModel& cens, double loss_scale) {
    if (alpha.size() != data.size()) {
        throw std::invalid_argument("regularized_objective: alpha length does not match data");
    }
    const Eigen::MatrixXd gram = gram_matrix(kernel, data.covariates());
    Eigen::VectorXd f = gram * alpha;
    if (intercept) f.array() += *intercept;
    return lambda * alpha.dot(gram * alpha) +
           loss_scale * censored_empirical_risk(f, data, cens, false);
}

}  // namespace csdsvm
