#pragma once

#include <Eigen/Dense>

#include <atomic>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace csdsvm {

inline constexpr double kDefaultDensityFloor = 1e-3;

/// How the KDE bandwidth is chosen.
struct BandwidthRule {
    enum class Kind { SilvermanBeta, Fixed };

    Kind kind = Kind::SilvermanBeta;
    double beta = 2.0;     // smoothness order, SilvermanBeta only
    double fixed_h = 0.0;  // Fixed only

    static BandwidthRule silverman(double beta = 2.0);
    static BandwidthRule fixed(double h);
};

/// 1.06 * scale * n^(-1/(2 beta + 1)).
double silverman_bandwidth(double scale, std::size_t n, double beta);

/// Throws std::invalid_argument on empty samples.
double select_bandwidth(std::span<const double> samples, const BandwidthRule& rule);

/// Density of the monitoring time given covariates, either supplied in closed
/// form or estimated by a normal-kernel KDE of the observed monitoring times.
/// Evaluations are clamped below at `floor()` so inverse weights stay finite.
class CensoringModel {
public:
    enum class Kind { Known, Kde };
    using DensityFn = std::function<double(double, const Eigen::VectorXd&)>;

    /// `tag` and `params` describe the density for persistence; only tags the
    /// model reader understands (currently "uniform") can be reloaded.
    static CensoringModel known(DensityFn density, std::string tag,
                                std::map<std::string, double> params,
                                double floor = kDefaultDensityFloor);
    /// g(c|z) = 1/tau on [0, tau].
    static CensoringModel uniform(double tau, double floor = kDefaultDensityFloor);
    static CensoringModel kde(std::vector<double> samples, double bandwidth,
                              double floor = kDefaultDensityFloor);

    Kind kind() const { return kind_; }
    double floor() const { return floor_; }

    const std::string& known_tag() const { return tag_; }
    const std::map<std::string, double>& known_params() const { return params_; }

    const std::vector<double>& kde_samples() const { return *samples_; }
    double bandwidth() const { return bandwidth_; }

    /// Density before the floor is applied. The KDE ignores z.
    double unclamped(double c, const Eigen::VectorXd& z) const;
    /// max(unclamped(c, z), floor); bumps the clamp counter when the floor binds.
    double density(double c, const Eigen::VectorXd& z) const;

    /// Number of evaluations where the floor was active, shared by copies.
    std::size_t clamp_count() const { return clamps_->load(std::memory_order_relaxed); }
    void reset_clamp_count() const { clamps_->store(0, std::memory_order_relaxed); }

private:
    CensoringModel() = default;

    Kind kind_ = Kind::Known;
    double floor_ = kDefaultDensityFloor;
    DensityFn known_;
    std::string tag_;
    std::map<std::string, double> params_;
    std::shared_ptr<const std::vector<double>> samples_ = std::make_shared<std::vector<double>>();
    double bandwidth_ = 0.0;
    std::shared_ptr<std::atomic<std::size_t>> clamps_ = std::make_shared<std::atomic<std::size_t>>(0);
};

/// Normal-kernel KDE with bandwidth chosen by `rule`.
CensoringModel fit_kde(std::span<const double> samples, const BandwidthRule& rule,
                       double floor = kDefaultDensityFloor);

inline double density_eval(const CensoringModel& model, double c, const Eigen::VectorXd& z) {
    return model.density(c, z);
}

}  // namespace csdsvm
