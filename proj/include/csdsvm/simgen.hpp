#pragma once

#include "csdsvm/dataset.hpp"
#include "csdsvm/model_select.hpp"
#include "csdsvm/solver.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace csdsvm {

enum class SimKind { Weibull1D, MultiWeibull, MultiLogNormal, Triangle, Degenerate };

/// Data-generating mechanism: Z ~ U[0,1]^d, C ~ U[0, tau], T from a
/// covariate-dependent law, truncated to [0, tau].
///
///   Weibull1D       d=1,  tau=1, Weibull(scale=exp(-z/2), shape=2)
///   MultiWeibull    d=10, tau=2, Weibull(scale=max(-0.5 z1 + 2 z2 - z3, 1e-3), shape=2)
///   MultiLogNormal  d=10, tau=7, LogNormal(mu=0.5 (0.3 z1 + 0.5 z2 + 0.2 z3), sigma=1)
///   Triangle        d=1,  tau=8, T = 4 + 6z + eps (z <= 0.5), 10 - 6z + eps otherwise, eps ~ N(0,1)
///   Degenerate      d=1,  tau=1, T = 0.25 + 0.5z (no noise; diagnostics only)
class SimSetting {
public:
    static SimSetting weibull_1d() { return SimSetting(SimKind::Weibull1D); }
    static SimSetting multi_weibull() { return SimSetting(SimKind::MultiWeibull); }
    static SimSetting multi_lognormal() { return SimSetting(SimKind::MultiLogNormal); }
    static SimSetting triangle() { return SimSetting(SimKind::Triangle); }
    static SimSetting degenerate() { return SimSetting(SimKind::Degenerate); }
    /// Accepts weibull, multiweibull, multilognormal, triangle, degenerate.
    static SimSetting from_name(const std::string& name);

    explicit SimSetting(SimKind kind) : kind_(kind) {}

    SimKind kind() const { return kind_; }
    std::string name() const;
    Eigen::Index dim() const;
    double tau() const;
    /// Number of leading covariates the failure-time law depends on.
    Eigen::Index active_dims() const;

    /// P(T > t | z) of the untruncated failure time.
    double survival(double t, const Eigen::VectorXd& z) const;
    /// Untruncated failure time at survival probability u in (0, 1).
    double failure_time(const Eigen::VectorXd& z, double u) const;
    /// Interior points of (0, tau) where the survival curve bends sharply;
    /// quadrature splits its range there.
    std::vector<double> breakpoints(const Eigen::VectorXd& z) const;

    bool operator==(const SimSetting&) const = default;

private:
    SimKind kind_;
};

struct LatentDataset {
    Dataset data;
    /// Failure times clamped to [0, tau]; status is 1{latent <= time}.
    Eigen::VectorXd latent;
};

LatentDataset generate(const SimSetting& setting, Eigen::Index n, std::uint64_t seed);

/// E[T ^ tau | Z = z] by adaptive quadrature of the survival curve.
double bayes_predict(const SimSetting& setting, const Eigen::VectorXd& z);
Eigen::VectorXd bayes_predict(const SimSetting& setting, const Eigen::MatrixXd& points);

/// Var(T ^ tau | Z = z).
double conditional_variance(const SimSetting& setting, const Eigen::VectorXd& z);

/// E_Z Var(T ^ tau | Z), integrated over the active covariates.
double bayes_risk(const SimSetting& setting);

/// Test MSE against the latent truncated failure times.
double evaluate_risk(const FittedModel& model, const LatentDataset& test);
double evaluate_risk(const Eigen::VectorXd& predictions, const LatentDataset& test);

enum class CensoringCase { Known, Estimated };

std::string to_string(CensoringCase c);

struct ExperimentConfig {
    KernelKind method = KernelKind::Rbf;
    /// Default grid for the setting's dimension when unset.
    std::optional<HyperGrid> grid;
    CensoringCase censoring_case = CensoringCase::Known;
    int folds = 5;
    Eigen::Index test_size = 10000;
    bool with_intercept = true;
    double density_floor = kDefaultDensityFloor;
    double kde_beta = 2.0;
};

struct ExperimentRow {
    std::string setting;
    Eigen::Index n;
    int rep;
    std::string method;
    std::string kernel;
    CensoringCase censoring_case;
    double risk;  // NaN when the repetition failed
    double bayes_risk;
    double sigma;  // NaN for the linear kernel or a failed repetition
    double lambda;
    std::uint64_t seed;  // training-data seed of this repetition
    std::string error;

    bool failed() const { return !error.empty(); }
};

struct ExperimentResult {
    std::vector<ExperimentRow> rows;
    double bayes_risk = 0.0;
    std::size_t failed_reps = 0;
    /// More than 5% of repetitions failed.
    bool flagged = false;

    std::vector<double> risks(Eigen::Index n) const;
};

struct RepSeeds {
    std::uint64_t train;
    std::uint64_t test;
    std::uint64_t cv;
};

RepSeeds derive_rep_seeds(std::uint64_t master_seed, const SimSetting& setting, Eigen::Index n,
                          int rep);

ExperimentResult run_experiment(const SimSetting& setting, const std::vector<Eigen::Index>& sizes,
                                int reps, const ExperimentConfig& config,
                                std::uint64_t master_seed);

/// Header: setting,n,rep,method,kernel,censoring_case,risk,bayes_risk,sigma,lambda,seed
void write_results_csv(std::ostream& out, const ExperimentResult& result);

}  // namespace csdsvm
