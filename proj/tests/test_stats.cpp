#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "homog/errors.hpp"
#include "homog/stats.hpp"
#include "support/test_util.hpp"

using namespace homog;

TEST_CASE("rate_fit: exact power laws, noise, degenerate input") {
    std::vector<double> xs{1.0, 2.0, 4.0, 8.0, 16.0};
    std::vector<double> ys;
    for (double x : xs) ys.push_back(3.0 * std::pow(x, -1.7));
    const RateFit exact = rate_fit(xs, ys);
    CHECK(std::fabs(exact.slope + 1.7) <= 1e-12);
    CHECK(exact.r_squared == doctest::Approx(1.0));

    // multiplicative 1% noise: slope recovered within a couple percent
    std::vector<double> noisy;
    for (std::size_t i = 0; i < xs.size(); ++i)
        noisy.push_back(ys[i] * (1.0 + 0.01 * (testutil::uniform01(500, i) - 0.5)));
    const RateFit fit = rate_fit(xs, noisy);
    CHECK(std::fabs(fit.slope + 1.7) <= 0.02);

    CHECK_THROWS_AS(rate_fit({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}), ParameterError);
    CHECK_THROWS_AS(rate_fit({1.0, 1.0, 1.0, 1.0}, {1.0, 2.0, 3.0, 4.0}), ParameterError);
    CHECK_THROWS_AS(rate_fit({1.0, 2.0, 4.0, -8.0}, {1.0, 1.0, 1.0, 1.0}), ParameterError);
}

TEST_CASE("jackknife standard error of the mean matches the textbook formula") {
    std::vector<double> xs;
    for (int i = 0; i < 200; ++i) xs.push_back(testutil::gaussian(501, i));
    auto mean_stat = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
    };
    const JackknifeEstimate est = jackknife(xs, mean_stat);
    double m = mean_stat(xs), ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    const double classic = std::sqrt(ss / (xs.size() * (xs.size() - 1.0)));
    CHECK(est.stderr_jk == doctest::Approx(classic).epsilon(1e-10));
}

TEST_CASE("clt profile of iid site noise shows the -d/2 slope and the closed form") {
    const TorusGrid g(2, 64);
    const int n_samples = 500;
    std::vector<ScalarField> fields;
    fields.reserve(n_samples);
    for (int s = 0; s < n_samples; ++s) {
        ScalarField f(g);
        for (std::size_t i = 0; i < g.sites(); ++i)
            f.v[i] = testutil::gaussian(600 + s, i);
        fields.push_back(std::move(f));
    }
    const std::vector<double> scales{2.0, 3.0, 4.0, 6.0, 8.0};
    const CltProfile prof = clt_profile(fields, scales);
    const RateFit fit = rate_fit(prof.scales, prof.stddev);
    CHECK(std::fabs(fit.slope + 1.0) <= 0.1);

    // white-noise closed form: std(F_R) ~ (4 pi R^2)^{-1/2} for d = 2
    const double predicted = 1.0 / std::sqrt(4.0 * M_PI * 16.0); // R = 4
    CHECK(prof.stddev[2] == doctest::Approx(predicted).epsilon(0.15));

    // constant fields give zero std at every scale
    std::vector<ScalarField> consts(40, ScalarField(g, 1.3));
    const CltProfile flat = clt_profile(consts, scales);
    for (double s : flat.stddev) CHECK(std::fabs(s) < 1e-13);

    CHECK_THROWS_AS(clt_profile(fields, std::vector<double>{64.0}), ParameterError);
}

TEST_CASE("covariance_Q recovers a known white-noise covariance") {
    const TorusGrid g(2, 16);
    // iid per-site vectors with covariance C = [[1, .3], [.3, .5]]
    const double c11 = 1.0, c12 = 0.3, c22 = 0.5;
    const double l11 = std::sqrt(c11), l21 = c12 / l11,
                 l22 = std::sqrt(c22 - l21 * l21);
    const int n_samples = 400;
    std::vector<std::array<double, 3>> means;
    for (int s = 0; s < n_samples; ++s) {
        double m0 = 0.0, m1 = 0.0;
        for (std::size_t i = 0; i < g.sites(); ++i) {
            const double z0 = testutil::gaussian(700 + s, 2 * i);
            const double z1 = testutil::gaussian(700 + s, 2 * i + 1);
            m0 += l11 * z0;
            m1 += l21 * z0 + l22 * z1;
        }
        means.push_back({m0 / static_cast<double>(g.sites()),
                         m1 / static_cast<double>(g.sites()), 0.0});
    }
    const CovarianceEstimate est = covariance_Q(means, g, 1.0);
    CHECK(std::fabs(est.Q_hat(0, 0) - c11) <= 4.0 * est.stderr_jk(0, 0));
    CHECK(std::fabs(est.Q_hat(0, 1) - c12) <= 4.0 * est.stderr_jk(0, 1));
    CHECK(std::fabs(est.Q_hat(1, 1) - c22) <= 4.0 * est.stderr_jk(1, 1));
    CHECK(std::fabs(est.Q_hat(0, 1) - est.Q_hat(1, 0)) <= 1e-12);

    // positive semidefinite up to MC error: smallest eigenvalue of the 2x2
    // block is bounded below by -4x the largest entry error
    const double tr = est.Q_hat(0, 0) + est.Q_hat(1, 1);
    const double det = est.Q_hat(0, 0) * est.Q_hat(1, 1) - est.Q_hat(0, 1) * est.Q_hat(1, 0);
    const double eig_min = 0.5 * (tr - std::sqrt(tr * tr - 4.0 * det));
    double max_se = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) max_se = std::max(max_se, est.stderr_jk(i, j));
    CHECK(eig_min >= -4.0 * max_se);

    // degenerate constant ensemble
    std::vector<std::array<double, 3>> zeros(150, {0.0, 0.0, 0.0});
    const CovarianceEstimate degenerate = covariance_Q(zeros, g, 1.0);
    CHECK(degenerate.Q_hat.frobenius_norm() == 0.0);

    CHECK_THROWS_AS(covariance_Q(std::vector<std::array<double, 3>>(50), g, 1.0),
                    ParameterError);
}

TEST_CASE("normality report on known distributions") {
    std::vector<double> normal, expo;
    for (int i = 0; i < 10000; ++i) {
        normal.push_back(testutil::gaussian(800, i));
        expo.push_back(-std::log(1.0 - homog::counter_uniform(801, i, 0, 3)));
    }
    const NormalityReport nrep = normality_report(normal);
    CHECK(std::fabs(nrep.skewness.value) <= 0.08);
    CHECK(std::fabs(nrep.excess_kurtosis.value) <= 0.15);
    CHECK(nrep.ks_distance <= 0.02);

    const NormalityReport erep = normality_report(expo);
    CHECK(erep.skewness.value == doctest::Approx(2.0).epsilon(0.08));
    CHECK(erep.ks_distance > 0.05); // detects non-normality

    CHECK_THROWS_AS(normality_report(std::vector<double>(100, 0.0)), ParameterError);
}

TEST_CASE("independence check on synthetic white noise") {
    const TorusGrid g(2, 32);
    TestFunctional za{{8.0, 8.0, 0.0}, 4.0};
    TestFunctional zb{{24.0, 24.0, 0.0}, 4.0};
    CHECK(za.support_gap(zb, g) > 0.0);

    std::vector<double> ia, ib;
    const ScalarField wa = za.weights(g);
    const ScalarField wb = zb.weights(g);
    for (int s = 0; s < 400; ++s) {
        double xa = 0.0, xb = 0.0;
        for (std::size_t i = 0; i < g.sites(); ++i) {
            const double z = testutil::gaussian(900 + s, i);
            xa += wa.v[i] * z;
            xb += wb.v[i] * z;
        }
        ia.push_back(xa);
        ib.push_back(xb);
    }
    const IndependenceResult res = independence_check(ia, ib, za, zb, g, 4.0);
    CHECK(std::fabs(res.correlation) <= 4.0 * res.stderr_mc);

    // same functional correlates perfectly through the overlap-permitting entry
    const IndependenceResult self = correlation_of_functionals(ia, ia);
    CHECK(self.correlation == doctest::Approx(1.0));

    TestFunctional overlap{{10.0, 8.0, 0.0}, 4.0};
    CHECK_THROWS_AS(independence_check(ia, ib, za, overlap, g, 1.0), ParameterError);
}
