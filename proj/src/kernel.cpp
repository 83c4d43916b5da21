#include "csdsvm/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace csdsvm {

namespace {

void require_same_dim(Eigen::Index a, Eigen::Index b) {
    if (a != b) {
        throw std::invalid_argument("kernel: dimension mismatch (" + std::to_string(a) +
                                    " vs " + std::to_string(b) + ")");
    }
    if (a < 1) {
        throw std::invalid_argument("kernel: points must have dimension >= 1");
    }
}

// Row-oriented evaluation shared by the matrix builders; dimensions are
// checked by the callers.
template <typename A, typename B>
double eval_unchecked(const KernelSpec& spec, const A& x, const B& y) {
    if (spec.kind() == KernelKind::Linear) {
        return x.dot(y);
    }
    const double sq = (x - y).squaredNorm();
    return std::exp(-sq / (2.0 * spec.sigma() * spec.sigma()));
}

}  // namespace

KernelSpec KernelSpec::rbf(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw std::invalid_argument("kernel: RBF width sigma must be positive and finite");
    }
    return KernelSpec(KernelKind::Rbf, sigma);
}

std::string KernelSpec::name() const {
    return kind_ == KernelKind::Linear ? "linear" : "rbf";
}

double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::VectorXd>& y) {
    require_same_dim(x.size(), y.size());
    return eval_unchecked(spec, x, y);
}

Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const Eigen::MatrixXd& points) {
    const Eigen::Index n = points.rows();
    if (n < 1) {
        throw std::invalid_argument("gram_matrix: need at least one point");
    }
    require_same_dim(points.cols(), points.cols());
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = j; i < n; ++i) {
            const double value = eval_unchecked(spec, points.row(i), points.row(j));
            k(i, j) = value;
            k(j, i) = value;
        }
    }
    return k;
}

Eigen::MatrixXd cross_kernel(const KernelSpec& spec, const Eigen::MatrixXd& train,
                             const Eigen::MatrixXd& query) {
    const Eigen::Index m = query.rows();
    const Eigen::Index n = train.rows();
    if (m > 0 && n > 0) {
        require_same_dim(query.cols(), train.cols());
    }
    Eigen::MatrixXd out(m, n);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            out(i, j) = eval_unchecked(spec, query.row(i), train.row(j));
        }
    }
    return out;
}

}  // namespace csdsvm
