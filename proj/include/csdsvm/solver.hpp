#pragma once

#include "csdsvm/censoring.hpp"
#include "csdsvm/dataset.hpp"
#include "csdsvm/kernel.hpp"

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>

namespace csdsvm {

/// The linear system could not be solved to the required accuracy.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double condition_estimate)
        : std::runtime_error(what), condition_estimate_(condition_estimate) {}

    /// Reciprocal condition estimate of the factorized system (0 when unknown).
    double condition_estimate() const { return condition_estimate_; }

private:
    double condition_estimate_;
};

/// Relative residual bound every accepted solve must meet.
inline constexpr double kResidualTolerance = 1e-8;

struct FitOptions {
    bool with_intercept = true;
    /// Multiplier on the empirical loss term. Scaling the loss by s and lambda
    /// by s leaves the minimizer unchanged; used to check the 1/tau^2-normalized
    /// formulation against the unnormalized one.
    double loss_scale = 1.0;
};

/// f(z) = sum_j alpha_j k(z, support_j) + b.
struct FittedModel {
    KernelSpec kernel;
    Eigen::MatrixXd support;
    Eigen::VectorXd alpha;
    std::optional<double> intercept;
    double lambda;
    CensoringModel censoring;
    double tau;
    double relative_residual = 0.0;

    Eigen::Index training_size() const { return support.rows(); }
    Eigen::Index dim() const { return support.cols(); }
    /// 1/(n lambda), the cost parameter of the dual formulation.
    double cost() const { return 1.0 / (static_cast<double>(training_size()) * lambda); }
};

struct DualSolution {
    Eigen::VectorXd alpha;
    std::optional<double> intercept;
    double relative_residual;
};

/// v_i = (1 - delta_i) / g(c_i | z_i), exactly 0 for uncensored-failure rows.
Eigen::VectorXd pseudo_targets(const Dataset& data, const CensoringModel& cens);

/// Solves (K + n lambda / s I) alpha = v, or the bordered system
/// [[K + n lambda / s I, 1], [1^T, 0]] [alpha; b] = [v; 0] when an intercept
/// is requested. Throws NumericalError if the relative residual exceeds
/// kResidualTolerance.
DualSolution solve_dual(const Eigen::MatrixXd& gram, const Eigen::VectorXd& targets,
                        double lambda, const FitOptions& options = {});

FittedModel fit(const Dataset& data, const KernelSpec& kernel, double lambda,
                const CensoringModel& cens, const FitOptions& options = {});

Eigen::VectorXd predict(const FittedModel& model, const Eigen::MatrixXd& query);

/// Mean of the data-dependent loss 2 v_i (c_i - f_i) + f_i^2. With `shift`,
/// adds max_i (1 - delta_i) / g(c_i|z_i)^2, which makes every term nonnegative
/// and never changes a comparison between prediction vectors.
double censored_empirical_risk(const Eigen::VectorXd& predictions, const Dataset& data,
                               const CensoringModel& cens, bool shift = false);

/// Same loss from precomputed pseudo-targets; the shift equals max_i v_i^2.
double censored_risk_from_targets(const Eigen::VectorXd& predictions,
                                  const Eigen::VectorXd& targets, const Eigen::VectorXd& times,
                                  bool shift = false);

/// lambda * alpha^T K alpha + loss_scale * censored_empirical_risk(K alpha + b).
double regularized_objective(const Eigen::VectorXd& alpha, std::optional<double> intercept,
                             const Dataset& data, const KernelSpec& kernel, double lambda,
                             const CensoringModel& cens, double loss_scale = 1.0);

}  // namespace csdsvm
