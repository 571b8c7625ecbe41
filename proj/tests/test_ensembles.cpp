#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "homog/ensemble.hpp"
#include "homog/errors.hpp"
#include "homog/rng.hpp"
#include "support/test_util.hpp"

using namespace homog;

TEST_CASE("philox matches an independently written reference") {
    const std::array<std::uint32_t, 4> zero_ctr{0, 0, 0, 0};
    const std::array<std::uint32_t, 2> zero_key{0, 0};
    CHECK(Philox4x32::run(zero_ctr, zero_key) == testutil::reference_philox(zero_ctr, zero_key));

    for (std::uint32_t trial = 1; trial <= 64; ++trial) {
        const std::array<std::uint32_t, 4> ctr{trial, 0xdeadbeefu * trial, ~trial,
                                               trial * trial};
        const std::array<std::uint32_t, 2> key{0x12345678u + trial, 0x9abcdef0u - trial};
        CHECK(Philox4x32::run(ctr, key) == testutil::reference_philox(ctr, key));
    }
}

TEST_CASE("counter uniforms look uniform") {
    const int n = 20000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = counter_uniform(99, i, 0, 1);
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        sum += u;
        sumsq += u * u;
    }
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.02));
    CHECK(sumsq / n == doctest::Approx(1.0 / 3.0).epsilon(0.02));
}

TEST_CASE("bernoulli degenerate limits") {
    const TorusGrid g(2, 8);
    EnsembleSpec spec;
    spec.p = 0.0;
    const CoefficientField all_one = sample(spec, g, 7, 0);
    for (double v : all_one.cond) CHECK(v == 1.0);
    spec.p = 1.0;
    const CoefficientField all_lam = sample(spec, g, 7, 0);
    for (double v : all_lam.cond) CHECK(v == spec.lambda);
}

TEST_CASE("sampling is deterministic and order-independent") {
    const TorusGrid g(2, 16);
    EnsembleSpec spec;
    const CoefficientField a1 = sample(spec, g, 123, 5);
    const CoefficientField a2 = sample(spec, g, 123, 5);
    CHECK(a1.cond == a2.cond);

#ifdef _OPENMP
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const CoefficientField serial = sample(spec, g, 123, 5);
    omp_set_num_threads(saved);
    CHECK(serial.cond == a1.cond);
#endif

    const CoefficientField other_index = sample(spec, g, 123, 6);
    CHECK(other_index.cond != a1.cond);
}

TEST_CASE("ellipticity bounds hold for every kind") {
    const TorusGrid g(2, 16);
    for (auto kind : {EnsembleKind::bernoulli, EnsembleKind::uniform, EnsembleKind::block}) {
        EnsembleSpec spec;
        spec.kind = kind;
        spec.lambda = 0.3;
        for (int s = 0; s < 5; ++s) {
            const CoefficientField a = sample(spec, g, 31, s);
            for (double v : a.cond) {
                CHECK(v >= spec.lambda);
                CHECK(v <= 1.0);
            }
        }
    }
}

TEST_CASE("invalid specs are rejected") {
    const TorusGrid g(2, 16);
    EnsembleSpec spec;
    spec.lambda = 1.5;
    CHECK_THROWS_AS(sample(spec, g, 1, 0), ParameterError);
    spec.lambda = 0.25;
    spec.p = 2.0;
    CHECK_THROWS_AS(sample(spec, g, 1, 0), ParameterError);
    EnsembleSpec block;
    block.kind = EnsembleKind::block;
    block.block_size = 3; // does not divide 16
    CHECK_THROWS_AS(sample(block, g, 1, 0), ParameterError);
    CHECK_THROWS_AS(parse_ensemble("gaussian", 0.25, 0.5, 4), ParameterError);
}

TEST_CASE("finite-sample stationarity of per-site means") {
    const TorusGrid g(2, 8);
    EnsembleSpec spec; // bernoulli, lambda .25, p .5 -> mean .625, sd .375
    const int n = 1000;
    const std::size_t site_a = g.index({1, 1, 0});
    const std::size_t site_b = g.index({5, 3, 0});
    double ma = 0.0, mb = 0.0;
    for (int s = 0; s < n; ++s) {
        const CoefficientField a = sample(spec, g, 77, s);
        ma += a.comp(0)[site_a];
        mb += a.comp(0)[site_b];
    }
    ma /= n;
    mb /= n;
    const double se = 0.375 / std::sqrt(static_cast<double>(n));
    CHECK(std::fabs(ma - mb) <= 4.0 * std::sqrt(2.0) * se);
}

TEST_CASE("independence at range: bernoulli at separation 2") {
    const TorusGrid g(2, 8);
    EnsembleSpec spec;
    const auto res = empirical_range_check(spec, g, 13, 2, 10000);
    CHECK(res.max_abs_correlation <= 4.0 * res.stderr_mc);
}

TEST_CASE("block ensemble: correlated inside a block, independent across") {
    const TorusGrid g(2, 16);
    EnsembleSpec spec;
    spec.kind = EnsembleKind::block;
    spec.block_size = 4;
    const auto inside = empirical_range_check(spec, g, 17, 2, 2000);
    CHECK(inside.max_abs_correlation > 0.5); // same draw shared within the block
    const auto outside = empirical_range_check(spec, g, 17, 8, 10000);
    CHECK(outside.max_abs_correlation <= 4.0 * outside.stderr_mc);
}

TEST_CASE("range check needs enough samples") {
    const TorusGrid g(2, 8);
    EnsembleSpec spec;
    CHECK_THROWS_AS(empirical_range_check(spec, g, 1, 2, 50), ParameterError);
}
