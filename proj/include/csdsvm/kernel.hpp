#pragma once

#include <Eigen/Dense>

#include <string>

namespace csdsvm {

enum class KernelKind { Linear, Rbf };

/// Reproducing kernel of the hypothesis space. Immutable once built; use the
/// factories so the width invariant is checked.
class KernelSpec {
public:
    static KernelSpec linear() { return KernelSpec(KernelKind::Linear, 0.0); }
    /// Gaussian RBF exp(-|x-y|^2 / (2 sigma^2)). Throws std::invalid_argument
    /// unless sigma is positive and finite.
    static KernelSpec rbf(double sigma);

    KernelKind kind() const { return kind_; }
    /// Width of the RBF kernel; 0 for the linear kernel.
    double sigma() const { return sigma_; }

    std::string name() const;

    bool operator==(const KernelSpec&) const = default;

private:
    KernelSpec(KernelKind kind, double sigma) : kind_(kind), sigma_(sigma) {}

    KernelKind kind_;
    double sigma_;
};

double kernel_eval(const KernelSpec& spec,
                   const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::VectorXd>& y);

/// Gram matrix over the rows of `points`. Each unordered pair is evaluated once
/// and mirrored, so the result is exactly symmetric.
Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const Eigen::MatrixXd& points);

/// m x n matrix with entry (i, j) = k(query_i, train_j). Rows of the inputs are points.
Eigen::MatrixXd cross_kernel(const KernelSpec& spec, const Eigen::MatrixXd& train,
                             const Eigen::MatrixXd& query);

}  // namespace csdsvm
