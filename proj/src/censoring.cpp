#include "csdsvm/censoring.hpp"

#include "csdsvm/stats.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace csdsvm {

namespace {

void require_positive(double value, const char* what) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw std::invalid_argument(std::string("censoring: ") + what +
                                    " must be positive and finite");
    }
}

}  // namespace

BandwidthRule BandwidthRule::silverman(double beta) {
    if (!(beta >= 1.0) || !std::isfinite(beta)) {
        throw std::invalid_argument("censoring: smoothness order beta must be >= 1");
    }
    BandwidthRule rule;
    rule.kind = Kind::SilvermanBeta;
    rule.beta = beta;
    return rule;
}

BandwidthRule BandwidthRule::fixed(double h) {
    require_positive(h, "fixed bandwidth");
    BandwidthRule rule;
    rule.kind = Kind::Fixed;
    rule.fixed_h = h;
    return rule;
}

double silverman_bandwidth(double scale, std::size_t n, double beta) {
    return 1.06 * scale * std::pow(static_cast<double>(n), -1.0 / (2.0 * beta + 1.0));
}

double select_bandwidth(std::span<const double> samples, const BandwidthRule& rule) {
    if (samples.empty()) {
        throw std::invalid_argument("select_bandwidth: no samples");
    }
    if (rule.kind == BandwidthRule::Kind::Fixed) {
        require_positive(rule.fixed_h, "fixed bandwidth");
        return rule.fixed_h;
    }
    const double sd = stats::sample_std(samples);
    if (!std::isfinite(sd)) {
        throw std::invalid_argument("select_bandwidth: sample standard deviation is not finite");
    }
    double scale = std::min(sd, stats::iqr(samples) / 1.34);
    if (scale == 0.0) scale = 1e-3;
    return silverman_bandwidth(scale, samples.size(), rule.beta);
}

CensoringModel CensoringModel::known(DensityFn density, std::string tag,
                                     std::map<std::string, double> params, double floor) {
    if (!density) throw std::invalid_argument("censoring: known density function is empty");
    require_positive(floor, "density floor");
    CensoringModel m;
    m.kind_ = Kind::Known;
    m.floor_ = floor;
    m.known_ = std::move(density);
    m.tag_ = std::move(tag);
    m.params_ = std::move(params);
    return m;
}

CensoringModel CensoringModel::uniform(double tau, double floor) {
    require_positive(tau, "uniform censoring horizon tau");
    const double g = 1.0 / tau;
    return known([g](double, const Eigen::VectorXd&) { return g; }, "uniform", {{"tau", tau}},
                 floor);
}

CensoringModel CensoringModel::kde(std::vector<double> samples, double bandwidth, double floor) {
    if (samples.empty()) throw std::invalid_argument("censoring: KDE needs at least one sample");
    for (double s : samples) {
        if (!std::isfinite(s)) throw std::invalid_argument("censoring: KDE sample is not finite");
    }
    require_positive(bandwidth, "bandwidth");
    require_positive(floor, "density floor");
    CensoringModel m;
    m.kind_ = Kind::Kde;
    m.floor_ = floor;
    m.samples_ = std::make_shared<const std::vector<double>>(std::move(samples));
    m.bandwidth_ = bandwidth;
    return m;
}

double CensoringModel::unclamped(double c, const Eigen::VectorXd& z) const {
    if (kind_ == Kind::Known) {
        return known_(c, z);
    }
    const double inv_h = 1.0 / bandwidth_;
    double sum = 0.0;
    for (double s : *samples_) {
        const double u = (s - c) * inv_h;
        sum += std::exp(-0.5 * u * u);
    }
    const double norm = std::numbers::inv_sqrtpi / std::numbers::sqrt2;
    return norm * sum * inv_h / static_cast<double>(samples_->size());
}

double CensoringModel::density(double c, const Eigen::VectorXd& z) const {
    const double g = unclamped(c, z);
    if (!(g >= floor_)) {
        clamps_->fetch_add(1, std::memory_order_relaxed);
        return floor_;
    }
    return g;
}

CensoringModel fit_kde(std::span<const double> samples, const BandwidthRule& rule, double floor) {
    const double h = select_bandwidth(samples, rule);
    return CensoringModel::kde(std::vector<double>(samples.begin(), samples.end()), h, floor);
}

}  // namespace csdsvm
