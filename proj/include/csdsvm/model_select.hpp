#pragma once

#include "csdsvm/censoring.hpp"
#include "csdsvm/dataset.hpp"
#include "csdsvm/kernel.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace csdsvm {

struct HyperGrid {
    KernelKind kernel_kind = KernelKind::Rbf;
    std::vector<double> sigmas;  // empty for the linear kernel
    std::vector<double> lambdas;

    /// sigma in {0.05, 0.1, 0.5, 1, 2, 5} * sqrt(d) (RBF only),
    /// lambda in {1e-4, 1e-3, 1e-2, 1e-1, 1}.
    static HyperGrid defaults(KernelKind kind, Eigen::Index dim);

    /// Throws std::invalid_argument if the grid is empty or has non-positive values.
    void validate() const;
    std::size_t size() const;
};

struct CvCell {
    KernelKind kernel_kind;
    double sigma;  // 0 for the linear kernel
    double lambda;
    std::vector<double> fold_risks;
    double mean_risk = 0.0;
    double std_risk = 0.0;
    bool failed = false;
    std::string error;

    KernelSpec kernel() const;
};

struct CvReport {
    std::vector<CvCell> cells;
    std::size_t chosen = 0;
    int folds = 0;
    std::uint64_t seed = 0;

    const CvCell& best() const { return cells.at(chosen); }
};

struct CvOptions {
    bool with_intercept = true;
    /// Score folds with the positivity-shifted loss. Never changes the choice.
    bool shift = false;
};

struct CvResult {
    KernelSpec kernel;
    double lambda;
    CvReport report;
};

/// Partition of {0, ..., n-1} into k folds whose sizes differ by at most one.
/// Deterministic in (n, k, seed). Each fold is returned sorted.
std::vector<std::vector<Eigen::Index>> kfold_split(Eigen::Index n, int k, std::uint64_t seed);

/// Grid search scored by the held-out censored empirical risk, with the given
/// censoring model shared by every fold. Ties on the mean risk go to the
/// smaller lambda, then the smaller sigma. Cells whose fit fails on any fold
/// are excluded and keep their error message in the report. Does not refit.
CvResult grid_search_cv(const Dataset& data, const HyperGrid& grid, int k,
                        const CensoringModel& cens, std::uint64_t seed,
                        const CvOptions& options = {});

/// Long-format table kernel_kind,sigma,lambda,fold,val_risk followed by a
/// "# summary" block with per-cell mean/std and the chosen cell.
void write_cv_report_csv(std::ostream& out, const CvReport& report);

}  // namespace csdsvm
