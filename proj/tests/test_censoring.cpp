#include "doctest.h"

#include "oracles.hpp"

#include "csdsvm/censoring.hpp"
#include "csdsvm/rng.hpp"
#include "csdsvm/stats.hpp"

#include <thread>

using namespace csdsvm;

namespace {

std::vector<double> uniform_samples(std::size_t n, std::uint64_t seed) {
    CounterStream rng(seed);
    std::vector<double> xs(n);
    for (auto& x : xs) x = rng.uniform_open();
    return xs;
}

double mean_abs_error_vs_one(const CensoringModel& model) {
    const Eigen::VectorXd z = Eigen::VectorXd::Zero(1);
    double sum = 0.0;
    for (double c : model.kde_samples()) sum += std::abs(model.density(c, z) - 1.0);
    return sum / static_cast<double>(model.kde_samples().size());
}

const Eigen::VectorXd kZ = Eigen::VectorXd::Zero(1);

}  // namespace

TEST_CASE("select_bandwidth examples") {
    const std::vector<double> xs{0.1, 0.4, 0.9};
    CHECK(select_bandwidth(xs, BandwidthRule::fixed(0.2)) == 0.2);
    // 32^(-1/5) = 1/2
    CHECK(silverman_bandwidth(1.0, 32, 2.0) == doctest::Approx(0.53).epsilon(1e-12));

    const auto u = uniform_samples(10000, 1);
    const double h = select_bandwidth(u, BandwidthRule::silverman(2.0));
    // Scale from the seeded sample, then the stated rule.
    const double scale = std::min(stats::sample_std(u), stats::iqr(u) / 1.34);
    CHECK(h == doctest::Approx(1.06 * scale * std::pow(10000.0, -0.2)).epsilon(1e-12));
    CHECK(h >= 0.02);
    CHECK(h <= 0.12);
}

TEST_CASE("select_bandwidth edge cases") {
    CHECK_THROWS_AS(select_bandwidth(std::vector<double>{}, BandwidthRule::silverman()),
                    std::invalid_argument);
    CHECK_THROWS_AS(BandwidthRule::silverman(0.5), std::invalid_argument);
    CHECK_THROWS_AS(BandwidthRule::fixed(0.0), std::invalid_argument);
    // Zero spread falls back to a 1e-3 scale.
    const std::vector<double> same(10, 0.3);
    CHECK(select_bandwidth(same, BandwidthRule::silverman(2.0)) ==
          doctest::Approx(silverman_bandwidth(1e-3, 10, 2.0)));
    CHECK(select_bandwidth(std::vector<double>{0.4}, BandwidthRule::silverman(2.0)) > 0.0);
}

TEST_CASE("bandwidth shrinks at rate n^(-1/(2 beta + 1))") {
    for (std::size_t n : {10u, 100u, 1000u}) {
        const double ratio = silverman_bandwidth(0.7, n, 2.0) / silverman_bandwidth(0.7, 32 * n, 2.0);
        CHECK(ratio == doctest::Approx(2.0).epsilon(0.01));
    }
}

TEST_CASE("fit_kde single-point examples") {
    const CensoringModel m = fit_kde(std::vector<double>{0.5}, BandwidthRule::fixed(1.0), 1e-3);
    CHECK(m.kind() == CensoringModel::Kind::Kde);
    CHECK(m.bandwidth() == 1.0);
    CHECK(m.unclamped(0.5, kZ) == doctest::Approx(oracle::normal_pdf(0.0)).epsilon(1e-12));
    CHECK(m.unclamped(0.5, kZ) == doctest::Approx(0.398942).epsilon(1e-6));
    CHECK(m.unclamped(1.5, kZ) == doctest::Approx(0.241971).epsilon(1e-6));
    CHECK(density_eval(m, 0.5, kZ) == doctest::Approx(0.398942).epsilon(1e-6));
}

TEST_CASE("fit_kde matches the brute-force estimator") {
    const auto xs = uniform_samples(200, 4);
    const CensoringModel m = fit_kde(xs, BandwidthRule::silverman(2.0));
    for (double c : {0.0, 0.2, 0.5, 0.99}) {
        double s = 0.0;
        for (double x : xs) s += oracle::normal_pdf((x - c) / m.bandwidth());
        CHECK(m.unclamped(c, kZ) ==
              doctest::Approx(s / (m.bandwidth() * static_cast<double>(xs.size()))).epsilon(1e-12));
    }
}

TEST_CASE("KDE of 1e4 uniform monitoring times") {
    const CensoringModel m = fit_kde(uniform_samples(10000, 8), BandwidthRule::silverman(2.0), 1e-3);
    CHECK(mean_abs_error_vs_one(m) <= 0.10);
}

TEST_CASE("fit_kde errors") {
    CHECK_THROWS_AS(fit_kde(std::vector<double>{}, BandwidthRule::silverman()), std::invalid_argument);
    CHECK_THROWS_AS(fit_kde(std::vector<double>{0.1}, BandwidthRule::silverman(), 0.0),
                    std::invalid_argument);
}

TEST_CASE("density_eval on known densities") {
    const CensoringModel uni = CensoringModel::uniform(1.0, 1e-3);
    Eigen::VectorXd z(3);
    z << 0.1, 0.2, 0.3;
    CHECK(density_eval(uni, 0.3, z) == 1.0);

    const CensoringModel tiny = CensoringModel::known(
        [](double, const Eigen::VectorXd&) { return 1e-6; }, "constant", {{"value", 1e-6}}, 1e-3);
    CHECK(tiny.clamp_count() == 0);
    CHECK(density_eval(tiny, 0.3, z) == 1e-3);
    CHECK(tiny.clamp_count() == 1);
    tiny.reset_clamp_count();
    CHECK(tiny.clamp_count() == 0);

    // Covariate-dependent densities are supported through the known variant.
    const CensoringModel cond = CensoringModel::known(
        [](double, const Eigen::VectorXd& zz) { return 1.0 + zz[0]; }, "affine", {});
    CHECK(density_eval(cond, 0.5, z) == doctest::Approx(1.1));
}

TEST_CASE("density never falls below the floor") {
    const CensoringModel m = fit_kde(uniform_samples(100, 2), BandwidthRule::silverman(2.0), 0.05);
    for (int i = 0; i <= 200; ++i) {
        const double c = -5.0 + 0.05 * i;
        CHECK(density_eval(m, c, kZ) >= 0.05);
    }
    CHECK(m.clamp_count() > 0);
}

TEST_CASE("clamp counter tolerates concurrent evaluation") {
    const CensoringModel m = CensoringModel::known(
        [](double, const Eigen::VectorXd&) { return 0.0; }, "zero", {}, 1e-3);
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t) {
        threads.emplace_back([&] {
            for (int i = 0; i < 1000; ++i) (void)m.density(0.1, kZ);
        });
    }
    for (auto& t : threads) t.join();
    CHECK(m.clamp_count() == 4000);
}

TEST_CASE("unclamped KDE integrates to one") {
    const auto xs = uniform_samples(300, 6);
    const CensoringModel m = fit_kde(xs, BandwidthRule::silverman(2.0));
    const double h = m.bandwidth();
    const double lo = *std::min_element(xs.begin(), xs.end()) - 12.0 * h;
    const double hi = *std::max_element(xs.begin(), xs.end()) + 12.0 * h;
    const double total = oracle::simpson([&](double c) { return m.unclamped(c, kZ); }, lo, hi, 20000);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("KDE error shrinks with sample size") {
    std::vector<double> small, large;
    for (std::uint64_t rep = 0; rep < 20; ++rep) {
        small.push_back(mean_abs_error_vs_one(
            fit_kde(uniform_samples(100, derive_seed({rep, 100})), BandwidthRule::silverman(2.0))));
        large.push_back(mean_abs_error_vs_one(
            fit_kde(uniform_samples(1600, derive_seed({rep, 1600})), BandwidthRule::silverman(2.0))));
    }
    CHECK(stats::median(large) < stats::median(small));
}
