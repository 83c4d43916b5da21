#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace csdsvm {

/// Current-status observations: covariates (n x d), monitoring times in
/// [0, tau] and status indicators 1{T <= C}. Validated on construction.
class Dataset {
public:
    Dataset(Eigen::MatrixXd covariates, Eigen::VectorXd times, Eigen::VectorXi status, double tau);

    Eigen::Index size() const { return covariates_.rows(); }
    Eigen::Index dim() const { return covariates_.cols(); }
    double tau() const { return tau_; }

    const Eigen::MatrixXd& covariates() const { return covariates_; }
    const Eigen::VectorXd& times() const { return times_; }
    const Eigen::VectorXi& status() const { return status_; }

    Eigen::VectorXd covariate(Eigen::Index i) const { return covariates_.row(i).transpose(); }

    /// Rows selected by `indices`, in the given order.
    Dataset subset(std::span<const Eigen::Index> indices) const;

private:
    Eigen::MatrixXd covariates_;
    Eigen::VectorXd times_;
    Eigen::VectorXi status_;
    double tau_;
};

}  // namespace csdsvm
