#include "csdsvm/simgen.hpp"

#include "csdsvm/rng.hpp"
#include "csdsvm/stats.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace csdsvm {

namespace {

constexpr double kMinWeibullScale = 1e-3;
constexpr double kInnerTol = 1e-10;
constexpr double kOuterTol = 1e-8;
constexpr unsigned kMaxDepth = 15;

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double weibull_scale(SimKind kind, const Eigen::VectorXd& z) {
    if (kind == SimKind::Weibull1D) return std::exp(-0.5 * z[0]);
    return std::max(-0.5 * z[0] + 2.0 * z[1] - z[2], kMinWeibullScale);
}

double triangle_mean(double z) { return z <= 0.5 ? 4.0 + 6.0 * z : 10.0 - 6.0 * z; }

double lognormal_mu(const Eigen::VectorXd& z) {
    return 0.5 * (0.3 * z[0] + 0.5 * z[1] + 0.2 * z[2]);
}

template <typename F>
double integrate(F&& f, double a, double b, double tol) {
    if (!(b > a)) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, kMaxDepth, tol);
}

/// Integral over [a, b] split at the cut points that fall strictly inside.
template <typename F>
double integrate_split(F&& f, double a, double b, std::vector<double> cuts, double tol) {
    std::vector<double> edges{a};
    std::sort(cuts.begin(), cuts.end());
    for (double c : cuts) {
        if (c > edges.back() && c < b) edges.push_back(c);
    }
    edges.push_back(b);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        total += integrate(f, edges[i], edges[i + 1], tol);
    }
    return total;
}

void require_unit_cube(const SimSetting& setting, const Eigen::VectorXd& z) {
    if (z.size() != setting.dim()) {
        throw std::invalid_argument("simgen: covariate dimension " + std::to_string(z.size()) +
                                    " does not match setting dimension " +
                                    std::to_string(setting.dim()));
    }
    if (!((z.array() >= 0.0).all() && (z.array() <= 1.0).all())) {
        throw std::invalid_argument("simgen: covariates must lie in the unit cube");
    }
}

struct Moments {
    double first;
    double second;
};

Moments truncated_moments(const SimSetting& setting, const Eigen::VectorXd& z) {
    const double tau = setting.tau();
    const auto cuts = setting.breakpoints(z);
    const double first = integrate_split(
        [&](double t) { return setting.survival(t, z); }, 0.0, tau, cuts, kInnerTol);
    const double second = integrate_split(
        [&](double t) { return 2.0 * t * setting.survival(t, z); }, 0.0, tau, cuts, kInnerTol);
    return {first, second};
}

std::string shortest(double x) {
    if (std::isnan(x)) return "NA";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

}  // namespace

SimSetting SimSetting::from_name(const std::string& name) {
    if (name == "weibull") return weibull_1d();
    if (name == "multiweibull") return multi_weibull();
    if (name == "multilognormal") return multi_lognormal();
    if (name == "triangle") return triangle();
    if (name == "degenerate") return degenerate();
    throw std::invalid_argument("unknown setting '" + name + "'");
}

std::string SimSetting::name() const {
    switch (kind_) {
        case SimKind::Weibull1D: return "weibull";
        case SimKind::MultiWeibull: return "multiweibull";
        case SimKind::MultiLogNormal: return "multilognormal";
        case SimKind::Triangle: return "triangle";
        case SimKind::Degenerate: return "degenerate";
    }
    return "unknown";
}

Eigen::Index SimSetting::dim() const {
    return kind_ == SimKind::MultiWeibull || kind_ == SimKind::MultiLogNormal ? 10 : 1;
}

double SimSetting::tau() const {
    switch (kind_) {
        case SimKind::Weibull1D: return 1.0;
        case SimKind::MultiWeibull: return 2.0;
        case SimKind::MultiLogNormal: return 7.0;
        case SimKind::Triangle: return 8.0;
        case SimKind::Degenerate: return 1.0;
    }
    return 1.0;
}

Eigen::Index SimSetting::active_dims() const { return dim() == 10 ? 3 : 1; }

double SimSetting::survival(double t, const Eigen::VectorXd& z) const {
    switch (kind_) {
        case SimKind::Weibull1D:
        case SimKind::MultiWeibull: {
            if (t <= 0.0) return 1.0;
            const double r = t / weibull_scale(kind_, z);
            return std::exp(-r * r);
        }
        case SimKind::MultiLogNormal:
            if (t <= 0.0) return 1.0;
            return normal_cdf(lognormal_mu(z) - std::log(t));
        case SimKind::Triangle:
            return normal_cdf(triangle_mean(z[0]) - t);
        case SimKind::Degenerate:
            return t < 0.25 + 0.5 * z[0] ? 1.0 : 0.0;
    }
    return 0.0;
}

double SimSetting::failure_time(const Eigen::VectorXd& z, double u) const {
    switch (kind_) {
        case SimKind::Weibull1D:
        case SimKind::MultiWeibull:
            return weibull_scale(kind_, z) * std::sqrt(-std::log(u));
        case SimKind::MultiLogNormal:
            return std::exp(lognormal_mu(z) + normal_quantile(u));
        case SimKind::Triangle:
            return triangle_mean(z[0]) + normal_quantile(u);
        case SimKind::Degenerate:
            return 0.25 + 0.5 * z[0];
    }
    return 0.0;
}

std::vector<double> SimSetting::breakpoints(const Eigen::VectorXd& z) const {
    switch (kind_) {
        case SimKind::Weibull1D:
        case SimKind::MultiWeibull: {
            const double s = weibull_scale(kind_, z);
            return {0.5 * s, s, 2.0 * s, 6.5 * s};
        }
        case SimKind::MultiLogNormal: {
            const double m = std::exp(lognormal_mu(z));
            return {m, 4.0 * m};
        }
        case SimKind::Triangle: {
            const double m = triangle_mean(z[0]);
            return {m - 4.0, m - 1.0, m, m + 1.0};
        }
        case SimKind::Degenerate:
            return {0.25 + 0.5 * z[0]};
    }
    return {};
}

LatentDataset generate(const SimSetting& setting, Eigen::Index n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("generate: n must be at least 1");
    const Eigen::Index d = setting.dim();
    const double tau = setting.tau();
    CounterStream rng(seed);
    Eigen::MatrixXd z(n, d);
    Eigen::VectorXd c(n);
    Eigen::VectorXi status(n);
    Eigen::VectorXd latent(n);
    Eigen::VectorXd row(d);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) row[j] = rng.uniform_open();
        c[i] = tau * rng.uniform_open();
        const double t = setting.failure_time(row, rng.uniform_open());
        latent[i] = std::clamp(t, 0.0, tau);
        status[i] = latent[i] <= c[i] ? 1 : 0;
        z.row(i) = row.transpose();
    }
    return LatentDataset{Dataset(std::move(z), std::move(c), std::move(status), tau),
                         std::move(latent)};
}

double bayes_predict(const SimSetting& setting, const Eigen::VectorXd& z) {
    require_unit_cube(setting, z);
    return integrate_split([&](double t) { return setting.survival(t, z); }, 0.0, setting.tau(),
                           setting.breakpoints(z), kInnerTol);
}

Eigen::VectorXd bayes_predict(const SimSetting& setting, const Eigen::MatrixXd& points) {
    Eigen::VectorXd out(points.rows());
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        out[i] = bayes_predict(setting, Eigen::VectorXd(points.row(i).transpose()));
    }
    return out;
}

double conditional_variance(const SimSetting& setting, const Eigen::VectorXd& z) {
    require_unit_cube(setting, z);
    const Moments m = truncated_moments(setting, z);
    return std::max(0.0, m.second - m.first * m.first);
}

double bayes_risk(const SimSetting& setting) {
    Eigen::VectorXd z = Eigen::VectorXd::Constant(setting.dim(), 0.5);
    if (setting.active_dims() == 1) {
        std::vector<double> cuts;
        if (setting.kind() == SimKind::Triangle) cuts.push_back(0.5);
        return integrate_split(
            [&](double x) {
                z[0] = x;
                return conditional_variance(setting, z);
            },
            0.0, 1.0, cuts, kOuterTol);
    }
    auto inner = [&](double z1, double z2) {
        std::vector<double> cuts;
        if (setting.kind() == SimKind::MultiWeibull) {
            // Where the clamped Weibull scale starts to bind.
            cuts.push_back(-0.5 * z1 + 2.0 * z2 - kMinWeibullScale);
        }
        return integrate_split(
            [&](double z3) {
                Eigen::VectorXd p = z;
                p[0] = z1;
                p[1] = z2;
                p[2] = z3;
                return conditional_variance(setting, p);
            },
            0.0, 1.0, cuts, kOuterTol);
    };
    return integrate(
        [&](double z1) {
            std::vector<double> cuts;
            if (setting.kind() == SimKind::MultiWeibull) {
                cuts = {0.25 * z1, 0.25 * z1 + 0.5};
            }
            return integrate_split([&](double z2) { return inner(z1, z2); }, 0.0, 1.0, cuts,
                                   kOuterTol);
        },
        0.0, 1.0, kOuterTol);
}

double evaluate_risk(const Eigen::VectorXd& predictions, const LatentDataset& test) {
    if (predictions.size() != test.latent.size()) {
        throw std::invalid_argument("evaluate_risk: prediction count does not match test set");
    }
    return (test.latent - predictions).squaredNorm() / static_cast<double>(predictions.size());
}

double evaluate_risk(const FittedModel& model, const LatentDataset& test) {
    if (model.dim() != test.data.dim()) {
        throw std::invalid_argument("evaluate_risk: model and test set dimensions differ");
    }
    return evaluate_risk(predict(model, test.data.covariates()), test);
}

std::string to_string(CensoringCase c) {
    return c == CensoringCase::Known ? "known" : "estimated";
}

std::vector<double> ExperimentResult::risks(Eigen::Index n) const {
    std::vector<double> out;
    for (const auto& row : rows) {
        if (row.n == n && !row.failed()) out.push_back(row.risk);
    }
    return out;
}

RepSeeds derive_rep_seeds(std::uint64_t master_seed, const SimSetting& setting, Eigen::Index n,
                          int rep) {
    const std::uint64_t s = hash_tag(setting.name());
    const auto size = static_cast<std::uint64_t>(n);
    const auto r = static_cast<std::uint64_t>(rep);
    return RepSeeds{derive_seed({master_seed, s, size, r, hash_tag("train")}),
                    derive_seed({master_seed, s, size, r, hash_tag("test")}),
                    derive_seed({master_seed, s, size, r, hash_tag("cv")})};
}

ExperimentResult run_experiment(const SimSetting& setting, const std::vector<Eigen::Index>& sizes,
                                int reps, const ExperimentConfig& config,
                                std::uint64_t master_seed) {
    if (reps < 1) throw std::invalid_argument("run_experiment: reps must be at least 1");
    if (sizes.empty()) throw std::invalid_argument("run_experiment: no sample sizes");
    for (Eigen::Index n : sizes) {
        if (n < 2) throw std::invalid_argument("run_experiment: sample sizes must be >= 2");
    }
    const HyperGrid grid = config.grid.value_or(HyperGrid::defaults(config.method, setting.dim()));
    grid.validate();
    const std::string kernel_name = config.method == KernelKind::Linear ? "linear" : "rbf";

    ExperimentResult result;
    result.bayes_risk = bayes_risk(setting);
    for (Eigen::Index n : sizes) {
        for (int rep = 0; rep < reps; ++rep) {
            const RepSeeds seeds = derive_rep_seeds(master_seed, setting, n, rep);
            ExperimentRow row{setting.name(),
                              n,
                              rep,
                              "csdsvm-" + kernel_name,
                              kernel_name,
                              config.censoring_case,
                              std::numeric_limits<double>::quiet_NaN(),
                              result.bayes_risk,
                              std::numeric_limits<double>::quiet_NaN(),
                              std::numeric_limits<double>::quiet_NaN(),
                              seeds.train,
                              {}};
            try {
                const LatentDataset train = generate(setting, n, seeds.train);
                const CensoringModel cens =
                    config.censoring_case == CensoringCase::Known
                        ? CensoringModel::uniform(setting.tau(), config.density_floor)
                        : fit_kde(std::span<const double>(train.data.times().data(),
                                                          static_cast<std::size_t>(n)),
                                  BandwidthRule::silverman(config.kde_beta), config.density_floor);
                const int folds = static_cast<int>(std::min<Eigen::Index>(config.folds, n));
                const CvResult cv = grid_search_cv(train.data, grid, folds, cens, seeds.cv,
                                                   {config.with_intercept, false});
                const FittedModel model =
                    fit(train.data, cv.kernel, cv.lambda, cens, {config.with_intercept, 1.0});
                const LatentDataset test = generate(setting, config.test_size, seeds.test);
                row.risk = evaluate_risk(model, test);
                if (cv.kernel.kind() == KernelKind::Rbf) row.sigma = cv.kernel.sigma();
                row.lambda = cv.lambda;
            } catch (const std::exception& e) {
                row.error = e.what();
                if (row.error.empty()) row.error = "unknown failure";
                ++result.failed_reps;
            }
            result.rows.push_back(std::move(row));
        }
    }
    result.flagged = static_cast<double>(result.failed_reps) >
                     0.05 * static_cast<double>(result.rows.size());
    return result;
}

void write_results_csv(std::ostream& out, const ExperimentResult& result) {
    out << "setting,n,rep,method,kernel,censoring_case,risk,bayes_risk,sigma,lambda,seed\n";
    for (const auto& row : result.rows) {
        out << row.setting << ',' << row.n << ',' << row.rep << ',' << row.method << ','
            << row.kernel << ',' << to_string(row.censoring_case) << ',' << shortest(row.risk)
            << ',' << shortest(row.bayes_risk) << ',' << shortest(row.sigma) << ','
            << shortest(row.lambda) << ',' << row.seed << '\n';
    }
}

}  // namespace csdsvm
