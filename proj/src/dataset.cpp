#include "csdsvm/dataset.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace csdsvm {

Dataset::Dataset(Eigen::MatrixXd covariates, Eigen::VectorXd times, Eigen::VectorXi status,
                 double tau)
    : covariates_(std::move(covariates)),
      times_(std::move(times)),
      status_(std::move(status)),
      tau_(tau) {
    const Eigen::Index n = covariates_.rows();
    if (n < 1 || covariates_.cols() < 1) {
        throw std::invalid_argument("dataset: need n >= 1 rows and d >= 1 covariates");
    }
    if (times_.size() != n || status_.size() != n) {
        throw std::invalid_argument("dataset: covariates, times and status differ in length");
    }
    if (!(tau_ > 0.0) || !std::isfinite(tau_)) {
        throw std::invalid_argument("dataset: tau must be positive and finite");
    }
    if (!covariates_.allFinite()) {
        throw std::invalid_argument("dataset: covariates must be finite");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(times_[i] >= 0.0 && times_[i] <= tau_)) {
            throw std::invalid_argument("dataset: time at row " + std::to_string(i) +
                                        " outside [0, tau]");
        }
        if (status_[i] != 0 && status_[i] != 1) {
            throw std::invalid_argument("dataset: status at row " + std::to_string(i) +
                                        " is not 0 or 1");
        }
    }
}

Dataset Dataset::subset(std::span<const Eigen::Index> indices) const {
    const auto m = static_cast<Eigen::Index>(indices.size());
    Eigen::MatrixXd z(m, dim());
    Eigen::VectorXd c(m);
    Eigen::VectorXi s(m);
    for (Eigen::Index r = 0; r < m; ++r) {
        const Eigen::Index i = indices[static_cast<std::size_t>(r)];
        if (i < 0 || i >= size()) throw std::out_of_range("dataset: subset index out of range");
        z.row(r) = covariates_.row(i);
        c[r] = times_[i];
        s[r] = status_[i];
    }
    return Dataset(std::move(z), std::move(c), std::move(s), tau_);
}

}  // namespace csdsvm
