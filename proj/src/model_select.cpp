#include "csdsvm/model_select.hpp"

#include "csdsvm/rng.hpp"
#include "csdsvm/solver.hpp"
#include "csdsvm/stats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace csdsvm {

namespace {

std::string shortest(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

}  // namespace

HyperGrid HyperGrid::defaults(KernelKind kind, Eigen::Index dim) {
    HyperGrid grid;
    grid.kernel_kind = kind;
    grid.lambdas = {1e-4, 1e-3, 1e-2, 1e-1, 1.0};
    if (kind == KernelKind::Rbf) {
        const double root_d = std::sqrt(static_cast<double>(dim));
        for (double s : {0.05, 0.1, 0.5, 1.0, 2.0, 5.0}) grid.sigmas.push_back(s * root_d);
    }
    return grid;
}

void HyperGrid::validate() const {
    if (lambdas.empty()) throw std::invalid_argument("grid: no lambda values");
    if (kernel_kind == KernelKind::Rbf && sigmas.empty()) {
        throw std::invalid_argument("grid: RBF grid needs at least one sigma");
    }
    if (kernel_kind == KernelKind::Linear && !sigmas.empty()) {
        throw std::invalid_argument("grid: linear kernel takes no sigma values");
    }
    auto positive = [](double x) { return x > 0.0 && std::isfinite(x); };
    if (!std::all_of(lambdas.begin(), lambdas.end(), positive) ||
        !std::all_of(sigmas.begin(), sigmas.end(), positive)) {
        throw std::invalid_argument("grid: values must be positive and finite");
    }
}

std::size_t HyperGrid::size() const {
    return lambdas.size() * (kernel_kind == KernelKind::Rbf ? sigmas.size() : 1);
}

KernelSpec CvCell::kernel() const {
    return kernel_kind == KernelKind::Linear ? KernelSpec::linear() : KernelSpec::rbf(sigma);
}

std::vector<std::vector<Eigen::Index>> kfold_split(Eigen::Index n, int k, std::uint64_t seed) {
    if (k < 2 || static_cast<Eigen::Index>(k) > n) {
        throw std::invalid_argument("kfold_split: need 2 <= k <= n (k=" + std::to_string(k) +
                                    ", n=" + std::to_string(n) + ")");
    }
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    CounterStream rng(derive_seed({seed, hash_tag("kfold")}));
    for (std::size_t i = order.size() - 1; i > 0; --i) {
        std::swap(order[i], order[rng.below(i + 1)]);
    }
    std::vector<std::vector<Eigen::Index>> folds(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < order.size(); ++i) {
        folds[i % folds.size()].push_back(order[i]);
    }
    for (auto& fold : folds) std::sort(fold.begin(), fold.end());
    return folds;
}

CvResult grid_search_cv(const Dataset& data, const HyperGrid& grid, int k,
                        const CensoringModel& cens, std::uint64_t seed,
                        const CvOptions& options) {
    grid.validate();
    const auto folds = kfold_split(data.size(), k, seed);
    const Eigen::VectorXd targets = pseudo_targets(data, cens);

    std::vector<double> sigmas = grid.sigmas;
    if (grid.kernel_kind == KernelKind::Linear) sigmas = {0.0};

    CvReport report;
    report.folds = k;
    report.seed = seed;
    for (double sigma : sigmas) {
        for (double lambda : grid.lambdas) {
            report.cells.push_back(CvCell{grid.kernel_kind, sigma, lambda, {}, 0.0, 0.0, false, {}});
        }
    }

    // Training folds share rows of one gram matrix per kernel width.
    const std::size_t per_sigma = grid.lambdas.size();
    for (std::size_t si = 0; si < sigmas.size(); ++si) {
        const KernelSpec kernel = report.cells[si * per_sigma].kernel();
        const Eigen::MatrixXd gram = gram_matrix(kernel, data.covariates());
        for (std::size_t f = 0; f < folds.size(); ++f) {
            const auto& val = folds[f];
            std::vector<Eigen::Index> train;
            for (std::size_t g = 0; g < folds.size(); ++g) {
                if (g != f) train.insert(train.end(), folds[g].begin(), folds[g].end());
            }
            std::sort(train.begin(), train.end());
            const Eigen::MatrixXd k_train = gram(train, train);
            const Eigen::MatrixXd k_val = gram(val, train);
            const Eigen::VectorXd v_train = targets(train);
            const Eigen::VectorXd v_val = targets(val);
            const Eigen::VectorXd c_val = data.times()(val);

            for (std::size_t li = 0; li < per_sigma; ++li) {
                CvCell& cell = report.cells[si * per_sigma + li];
                if (cell.failed) continue;
                try {
                    const DualSolution sol =
                        solve_dual(k_train, v_train, cell.lambda, {options.with_intercept, 1.0});
                    Eigen::VectorXd pred = k_val * sol.alpha;
                    if (sol.intercept) pred.array() += *sol.intercept;
                    cell.fold_risks.push_back(
                        censored_risk_from_targets(pred, v_val, c_val, options.shift));
                } catch (const NumericalError& e) {
                    cell.failed = true;
                    cell.error = "fold " + std::to_string(f) + ": " + e.what();
                }
            }
        }
    }

    bool any = false;
    for (std::size_t i = 0; i < report.cells.size(); ++i) {
        CvCell& cell = report.cells[i];
        if (cell.failed) continue;
        cell.mean_risk = stats::mean(cell.fold_risks);
        cell.std_risk = stats::sample_std(cell.fold_risks);
        if (!any) {
            report.chosen = i;
            any = true;
            continue;
        }
        const CvCell& best = report.cells[report.chosen];
        const bool better =
            cell.mean_risk < best.mean_risk ||
            (cell.mean_risk == best.mean_risk &&
             (cell.lambda < best.lambda || (cell.lambda == best.lambda && cell.sigma < best.sigma)));
        if (better) report.chosen = i;
    }
    if (!any) {
        throw NumericalError("grid_search_cv: every grid cell failed; first error: " +
                                 report.cells.front().error,
                             0.0);
    }
    const CvCell& best = report.best();
    return CvResult{best.kernel(), best.lambda, std::move(report)};
}

void write_cv_report_csv(std::ostream& out, const CvReport& report) {
    auto kind = [](KernelKind k) { return k == KernelKind::Linear ? "linear" : "rbf"; };
    out << "kernel_kind,sigma,lambda,fold,val_risk\n";
    for (const CvCell& cell : report.cells) {
        for (std::size_t f = 0; f < cell.fold_risks.size(); ++f) {
            out << kind(cell.kernel_kind) << ',' << shortest(cell.sigma) << ','
                << shortest(cell.lambda) << ',' << f << ',' << shortest(cell.fold_risks[f])
                << '\n';
        }
    }
    out << "# summary folds=" << report.folds << " seed=" << report.seed << '\n';
    out << "kernel_kind,sigma,lambda,mean_val_risk,std_val_risk,status,chosen\n";
    for (std::size_t i = 0; i < report.cells.size(); ++i) {
        const CvCell& cell = report.cells[i];
        out << kind(cell.kernel_kind) << ',' << shortest(cell.sigma) << ','
            << shortest(cell.lambda) << ',';
        if (cell.failed) {
            out << ",,failed,0\n";
        } else {
            out << shortest(cell.mean_risk) << ',' << shortest(cell.std_risk) << ",ok,"
                << (i == report.chosen ? 1 : 0) << '\n';
        }
    }
}

}  // namespace csdsvm
