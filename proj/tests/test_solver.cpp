#include "doctest.h"

#include "oracles.hpp"

#include "csdsvm/rng.hpp"
#include "csdsvm/simgen.hpp"
#include "csdsvm/solver.hpp"

using namespace csdsvm;

namespace {

/// z = (1, 2) in R^1, both censored (delta = 0), times (0.3, 0.6), tau = 1.
Dataset two_point() {
    Eigen::MatrixXd z(2, 1);
    z << 1, 2;
    Eigen::VectorXd c(2);
    c << 0.3, 0.6;
    return Dataset(z, c, Eigen::VectorXi::Zero(2), 1.0);
}

Dataset random_dataset(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
    CounterStream rng(seed);
    Eigen::MatrixXd z(n, d);
    Eigen::VectorXd c(n);
    Eigen::VectorXi s(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) z(i, j) = rng.uniform_open();
        c[i] = rng.uniform_open();
        s[i] = rng.uniform_open() < 0.4 ? 1 : 0;
    }
    return Dataset(z, c, s, 1.0);
}

const CensoringModel kUniform = CensoringModel::uniform(1.0);

/// A known density that varies with time so weights are not all equal.
const CensoringModel kSloped = CensoringModel::known(
    [](double c, const Eigen::VectorXd&) { return 0.5 + c; }, "sloped", {});

}  // namespace

TEST_CASE("pseudo_targets examples") {
    Eigen::MatrixXd z(3, 1);
    z << 0.1, 0.2, 0.3;
    Eigen::VectorXd c(3);
    c << 0.2, 0.5, 0.7;
    Eigen::VectorXi s(3);
    s << 1, 0, 0;
    const Dataset data(z, c, s, 1.0);
    const Eigen::VectorXd v = pseudo_targets(data, kUniform);
    CHECK(v[0] == 0.0);
    CHECK(v[1] == 1.0);
    const CensoringModel quarter = CensoringModel::known(
        [](double, const Eigen::VectorXd&) { return 0.25; }, "quarter", {});
    CHECK(pseudo_targets(data, quarter)[2] == 4.0);
}

TEST_CASE("two-point linear fit matches direct minimization") {
    const Dataset data = two_point();
    const FittedModel m = fit(data, KernelSpec::linear(), 0.5, kUniform, {false, 1.0});
    CHECK(m.alpha[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(m.alpha[1]) <= 1e-12);
    CHECK(!m.intercept);
    CHECK(m.cost() == doctest::Approx(1.0));

    // Minimize the objective over alpha with a derivative-free optimizer. The
    // linear gram matrix has rank one here, so compare fitted functions.
    const Eigen::MatrixXd k = gram_matrix(KernelSpec::linear(), data.covariates());
    const Eigen::VectorXd v = Eigen::VectorXd::Ones(2);
    const auto objective = [&](const Eigen::VectorXd& a) {
        return oracle::direct_objective(k, v, data.times(), 0.5, a, 0.0);
    };
    const Eigen::VectorXd best = oracle::nelder_mead(objective, Eigen::VectorXd::Zero(2), 0.3, 4000);
    const Eigen::VectorXd f_oracle = k * best;
    const Eigen::VectorXd f_fit = predict(m, data.covariates());
    CHECK(f_fit[0] == doctest::Approx(f_oracle[0]).epsilon(1e-6));
    CHECK(f_fit[1] == doctest::Approx(f_oracle[1]).epsilon(1e-6));
    CHECK(objective(m.alpha) <= objective(best) + 1e-12);
}

TEST_CASE("fit examples") {
    Dataset data = random_dataset(12, 2, 3);
    const Dataset all_failed(data.covariates(), data.times(), Eigen::VectorXi::Ones(12), 1.0);

    const FittedModel zero = fit(all_failed, KernelSpec::rbf(0.5), 0.1, kUniform, {false, 1.0});
    CHECK(zero.alpha.isZero(0.0));
    CHECK((predict(zero, data.covariates()).array() == 0.0).all());

    const FittedModel zero_b = fit(all_failed, KernelSpec::rbf(0.5), 0.1, kUniform, {true, 1.0});
    CHECK(zero_b.alpha.norm() <= 1e-15);
    REQUIRE(zero_b.intercept);
    CHECK(std::abs(*zero_b.intercept) <= 1e-15);
}

TEST_CASE("fit preconditions") {
    const Dataset data = random_dataset(5, 1, 1);
    CHECK_THROWS_AS(fit(data, KernelSpec::linear(), 0.0, kUniform), std::invalid_argument);
    CHECK_THROWS_AS(fit(data, KernelSpec::linear(), -1.0, kUniform), std::invalid_argument);
    const Dataset one = random_dataset(1, 1, 1);
    CHECK_THROWS_AS(fit(one, KernelSpec::linear(), 0.1, kUniform, {true, 1.0}), std::invalid_argument);
    CHECK_NOTHROW(fit(one, KernelSpec::linear(), 0.1, kUniform, {false, 1.0}));
}

TEST_CASE("non-finite systems surface as NumericalError") {
    Eigen::MatrixXd gram = Eigen::MatrixXd::Identity(3, 3);
    gram(1, 1) = NAN;
    for (bool intercept : {false, true}) {
        CHECK_THROWS_AS(solve_dual(gram, Eigen::VectorXd::Ones(3), 0.1, {intercept, 1.0}),
                        NumericalError);
    }
}

TEST_CASE("predict examples") {
    const Dataset data = two_point();
    const FittedModel m = fit(data, KernelSpec::linear(), 0.5, kUniform, {false, 1.0});
    Eigen::MatrixXd q(1, 1);
    q << 3;
    CHECK(predict(m, q)[0] == doctest::Approx(1.5).epsilon(1e-12));

    FittedModel zero = m;
    zero.alpha.setZero();
    zero.intercept = 0.0;
    CHECK(predict(zero, q).isZero(0.0));

    const Dataset r = random_dataset(15, 3, 7);
    const FittedModel mb = fit(r, KernelSpec::rbf(0.7), 0.01, kUniform, {true, 1.0});
    const Eigen::VectorXd expected =
        (gram_matrix(mb.kernel, r.covariates()) * mb.alpha).array() + *mb.intercept;
    CHECK((predict(mb, r.covariates()) - expected).cwiseAbs().maxCoeff() <= 1e-12);

    CHECK_THROWS_AS(predict(mb, Eigen::MatrixXd::Zero(2, 2)), std::invalid_argument);
}

TEST_CASE("censored_empirical_risk examples") {
    const Dataset data = random_dataset(20, 2, 9);
    const Eigen::VectorXd f = Eigen::VectorXd::LinSpaced(20, -1.0, 2.0);

    const Dataset all_failed(data.covariates(), data.times(), Eigen::VectorXi::Ones(20), 1.0);
    CHECK(censored_empirical_risk(f, all_failed, kSloped) ==
          doctest::Approx(f.squaredNorm() / 20.0).epsilon(1e-14));

    const Eigen::VectorXd v = pseudo_targets(data, kSloped);
    CHECK(censored_empirical_risk(Eigen::VectorXd::Zero(20), data, kSloped) ==
          doctest::Approx(2.0 * v.dot(data.times()) / 20.0).epsilon(1e-14));

    const double shift = v.array().square().maxCoeff();
    CHECK(censored_empirical_risk(f, data, kSloped, true) ==
          doctest::Approx(censored_empirical_risk(f, data, kSloped) + shift).epsilon(1e-14));

    CHECK_THROWS_AS(censored_empirical_risk(Eigen::VectorXd::Zero(3), data, kSloped),
                    std::invalid_argument);
}

TEST_CASE("positivity shift makes every loss term nonnegative and keeps rankings") {
    const Dataset data = random_dataset(30, 1, 13);
    const Eigen::VectorXd v = pseudo_targets(data, kSloped);
    const double a = v.array().square().maxCoeff();
    CounterStream rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        Eigen::VectorXd f1(30), f2(30);
        for (Eigen::Index i = 0; i < 30; ++i) {
            f1[i] = 4.0 * rng.uniform_open() - 2.0;
            f2[i] = 4.0 * rng.uniform_open() - 2.0;
        }
        for (Eigen::Index i = 0; i < 30; ++i) {
            // The minimum over f of 2v(c - f) + f^2 is 2vc - v^2 >= -a.
            CHECK(2.0 * v[i] * (data.times()[i] - f1[i]) + f1[i] * f1[i] + a >= -1e-12);
        }
        const bool plain = censored_empirical_risk(f1, data, kSloped) <
                           censored_empirical_risk(f2, data, kSloped);
        const bool shifted = censored_empirical_risk(f1, data, kSloped, true) <
                             censored_empirical_risk(f2, data, kSloped, true);
        CHECK(plain == shifted);
    }
}

TEST_CASE("regularized_objective examples") {
    const Dataset data = random_dataset(10, 2, 17);
    const KernelSpec kernel = KernelSpec::rbf(0.8);
    const Eigen::VectorXd v = pseudo_targets(data, kSloped);
    CHECK(regularized_objective(Eigen::VectorXd::Zero(10), 0.0, data, kernel, 0.1, kSloped) ==
          doctest::Approx(2.0 * v.dot(data.times()) / 10.0).epsilon(1e-14));

    const Eigen::VectorXd alpha = Eigen::VectorXd::LinSpaced(10, -0.3, 0.4);
    const Eigen::VectorXd f = (gram_matrix(kernel, data.covariates()) * alpha).array() + 0.2;
    const double loss = censored_empirical_risk(f, data, kSloped);
    const double at1 = regularized_objective(alpha, 0.2, data, kernel, 0.1, kSloped) - loss;
    const double at10 = regularized_objective(alpha, 0.2, data, kernel, 1.0, kSloped) - loss;
    CHECK(at10 == doctest::Approx(10.0 * at1).epsilon(1e-12));

    // Closed form beats random perturbations on the two-point example.
    const Dataset tp = two_point();
    const FittedModel m = fit(tp, KernelSpec::linear(), 0.5, kUniform, {false, 1.0});
    const double best = regularized_objective(m.alpha, std::nullopt, tp, m.kernel, 0.5, kUniform);
    CounterStream rng(5);
    for (int i = 0; i < 1000; ++i) {
        Eigen::VectorXd eta(2);
        eta << 2.0 * rng.uniform_open() - 1.0, 2.0 * rng.uniform_open() - 1.0;
        eta *= rng.uniform_open() / std::max(1.0, eta.norm());
        CHECK(best <= regularized_objective(m.alpha + eta, std::nullopt, tp, m.kernel, 0.5, kUniform) +
                          1e-12);
    }
}

TEST_CASE("fit invariants over random instances") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        CounterStream rng(derive_seed({seed, 31}));
        const auto n = static_cast<Eigen::Index>(2 + rng.below(40));
        const auto d = static_cast<Eigen::Index>(1 + rng.below(4));
        const Dataset data = random_dataset(n, d, seed);
        const double lambda = std::pow(10.0, -3.0 + 3.0 * rng.uniform_open());
        for (const KernelSpec& kernel : {KernelSpec::linear(), KernelSpec::rbf(0.2 + rng.uniform_open())}) {
            const Eigen::MatrixXd k = gram_matrix(kernel, data.covariates());
            const Eigen::VectorXd v = pseudo_targets(data, kSloped);

            const FittedModel plain = fit(data, kernel, lambda, kSloped, {false, 1.0});
            Eigen::MatrixXd sys = k;
            sys.diagonal().array() += static_cast<double>(n) * lambda;
            CHECK((sys * plain.alpha - v).norm() / std::max(1.0, v.norm()) <= 1e-8);
            // alpha = (v - K alpha) / (n lambda)
            const Eigen::VectorXd rhs = (v - k * plain.alpha) / (static_cast<double>(n) * lambda);
            CHECK((plain.alpha - rhs).norm() <= 1e-8 * std::max(1.0, plain.alpha.norm()));

            const FittedModel bordered = fit(data, kernel, lambda, kSloped, {true, 1.0});
            REQUIRE(bordered.intercept);
            CHECK(bordered.relative_residual <= 1e-8);
            CHECK(std::abs(bordered.alpha.sum()) <= 1e-8 * std::max(bordered.alpha.lpNorm<1>(), 1e-300));
            const Eigen::VectorXd r = sys * bordered.alpha + Eigen::VectorXd::Constant(n, *bordered.intercept) - v;
            CHECK(r.norm() / std::max(1.0, v.norm()) <= 1e-8);
        }
    }
}

TEST_CASE("closed form is not beaten by random candidates") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const Dataset data = random_dataset(6 + static_cast<Eigen::Index>(seed), 2, seed + 100);
        const KernelSpec kernel = seed % 2 ? KernelSpec::linear() : KernelSpec::rbf(0.6);
        const bool intercept = seed >= 2;
        const FittedModel m = fit(data, kernel, 0.05, kSloped, {intercept, 1.0});
        const Eigen::MatrixXd k = gram_matrix(kernel, data.covariates());
        const Eigen::VectorXd v = pseudo_targets(data, kSloped);
        const double b0 = m.intercept.value_or(0.0);
        const double best = oracle::direct_objective(k, v, data.times(), 0.05, m.alpha, b0);
        CounterStream rng(seed);
        double worst_gap = INFINITY;
        for (int i = 0; i < 100000; ++i) {
            Eigen::VectorXd eta(m.alpha.size());
            for (Eigen::Index j = 0; j < eta.size(); ++j) eta[j] = 2.0 * rng.uniform_open() - 1.0;
            eta *= rng.uniform_open() / eta.norm();
            const double db = intercept ? 2.0 * rng.uniform_open() - 1.0 : 0.0;
            worst_gap = std::min(worst_gap, oracle::direct_objective(k, v, data.times(), 0.05,
                                                                     m.alpha + eta, b0 + db) - best);
        }
        CHECK(worst_gap >= -1e-10);
    }
}

TEST_CASE("stronger regularization never increases the RKHS norm") {
    const Dataset data = random_dataset(40, 2, 23);
    const KernelSpec kernel = KernelSpec::rbf(0.5);
    const Eigen::MatrixXd k = gram_matrix(kernel, data.covariates());
    double previous = INFINITY;
    for (double lambda : {1e-3, 3e-3, 1e-2, 3e-2, 0.1, 0.3, 1.0, 3.0, 10.0}) {
        const FittedModel m = fit(data, kernel, lambda, kSloped, {false, 1.0});
        const double norm = m.alpha.dot(k * m.alpha);
        CHECK(norm <= previous + 1e-10);
        previous = norm;
    }
}

TEST_CASE("fit depends on times only through the censoring weights") {
    const Dataset data = random_dataset(25, 2, 29);
    // Uniform density: moving the times leaves every weight unchanged.
    Eigen::VectorXd moved = data.times().reverse();
    const Dataset shuffled(data.covariates(), moved, data.status(), 1.0);
    for (bool intercept : {false, true}) {
        const FittedModel a = fit(data, KernelSpec::rbf(0.4), 0.02, kUniform, {intercept, 1.0});
        const FittedModel b = fit(shuffled, KernelSpec::rbf(0.4), 0.02, kUniform, {intercept, 1.0});
        CHECK(a.alpha == b.alpha);
        CHECK(a.intercept == b.intercept);
    }
}

TEST_CASE("normalized loss with rescaled lambda gives the same solution") {
    const double tau = 7.0;
    const Dataset base = random_dataset(30, 3, 37);
    const Dataset data(base.covariates(), base.times() * tau, base.status(), tau);
    const CensoringModel cens = CensoringModel::uniform(tau);
    const double lambda = 0.03;
    for (bool intercept : {false, true}) {
        const FittedModel plain = fit(data, KernelSpec::rbf(0.9), lambda, cens, {intercept, 1.0});
        const FittedModel scaled =
            fit(data, KernelSpec::rbf(0.9), lambda / (tau * tau), cens, {intercept, 1.0 / (tau * tau)});
        CHECK((plain.alpha - scaled.alpha).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK(std::abs(plain.intercept.value_or(0.0) - scaled.intercept.value_or(0.0)) <= 1e-10);
        // The normalized objective is the plain one divided by tau^2.
        const double o1 = regularized_objective(plain.alpha, plain.intercept, data, plain.kernel, lambda, cens);
        const double o2 = regularized_objective(plain.alpha, plain.intercept, data, plain.kernel,
                                                lambda / (tau * tau), cens, 1.0 / (tau * tau));
        CHECK(o2 == doctest::Approx(o1 / (tau * tau)).epsilon(1e-12));
    }
}

TEST_CASE("censored risk tracks the uncensored risk on setting-1 data") {
    const SimSetting setting = SimSetting::weibull_1d();
    const LatentDataset sim = generate(setting, 100000, 4242);
    const Eigen::VectorXd f = sim.data.covariates().col(0);
    const double censored = censored_empirical_risk(f, sim.data, CensoringModel::uniform(1.0));
    const double uncensored = (sim.latent - f).squaredNorm() / 1e5;
    CHECK(std::abs(censored - uncensored) <= 0.02);
}
