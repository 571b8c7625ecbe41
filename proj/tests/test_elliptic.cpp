#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "homog/corrector.hpp"
#include "homog/ensemble.hpp"
#include "homog/errors.hpp"
#include "homog/fft.hpp"
#include "homog/kernels.hpp"
#include "homog/minimal_radius.hpp"
#include "homog/ops.hpp"
#include "homog/richardson.hpp"
#include "support/dense_oracle.hpp"
#include "support/test_util.hpp"

using namespace homog;
using testutil::max_abs_diff;
using testutil::max_abs_of;

namespace {

CoefficientField random_medium(const TorusGrid& g, std::uint64_t seed, double lambda = 0.25) {
    EnsembleSpec spec;
    spec.lambda = lambda;
    return sample(spec, g, seed, 0);
}

// Stripes perpendicular to axis 0 with conductances c1, c2 on alternating
// layers (the classical series/parallel laminate).
CoefficientField laminate(const TorusGrid& g, double c1, double c2) {
    CoefficientField a(g, std::min(c1, c2));
    for (int ax = 0; ax < g.dim; ++ax)
        for (std::size_t i = 0; i < g.sites(); ++i)
            a.comp(ax)[i] = (g.coords(i)[0] % 2 == 0) ? c1 : c2;
    return a;
}

} // namespace

TEST_CASE("solve_massive_elliptic: zero rhs, eigenmode, dense oracle, cap") {
    const TorusGrid g(2, 4);
    const CoefficientField a = random_medium(g, 5);
    SolverConfig cfg;

    CHECK(max_abs(solve_massive_elliptic(a, 10.0, ScalarField(g), cfg)) == 0.0);

    const TorusGrid g8(2, 8);
    CoefficientField ones(g8, 0.5, 1.0);
    ScalarField mode(g8);
    for (std::size_t i = 0; i < g8.sites(); ++i)
        mode.v[i] = std::cos(2.0 * M_PI * 2.0 * g8.coords(i)[0] / g8.side);
    const double lam = 4.0 * std::pow(std::sin(M_PI * 2.0 / g8.side), 2);
    const double T = 10.0;
    const ScalarField u = solve_massive_elliptic(ones, T, mode, cfg);
    std::vector<double> expect = mode.v;
    for (double& v : expect) v /= 1.0 / T + lam;
    CHECK(max_abs_diff(u.v, expect) <= 1e-8 * max_abs_of(expect));

    const ScalarField rhs = testutil::random_scalar(g, 6);
    const ScalarField x = solve_massive_elliptic(a, 10.0, rhs, cfg);
    const auto dense = oracle::lu_solve(oracle::massive_operator_matrix(a, 0.1), rhs.v);
    CHECK(max_abs_diff(x.v, dense) <= 1e-9 * std::max(1.0, max_abs_of(dense)));

    SolverConfig capped;
    capped.max_iterations = 1;
    CHECK_THROWS_AS(solve_massive_elliptic(a, 10.0, rhs, capped), ConvergenceError);
    try {
        solve_massive_elliptic(a, 10.0, rhs, capped);
    } catch (const ConvergenceError& e) {
        CHECK(e.last_residual > 0.0);
        CHECK(e.iterations == 1);
    }
}

TEST_CASE("cg error decreases monotonically in the operator norm") {
    const TorusGrid g(2, 4);
    const CoefficientField a = random_medium(g, 7);
    const ScalarField rhs = testutil::random_scalar(g, 8);
    const double mass = 0.2;
    const auto M = oracle::massive_operator_matrix(a, mass);
    const auto x_true = oracle::lu_solve(M, rhs.v);

    const std::size_t n = g.sites();
    std::vector<double> x(n, 0.0);
    auto apply = [&](const double* in, double* out) {
        kernels::apply_conductance(a, in, out, mass, 1.0);
    };
    SolverConfig cfg;
    cfg.rel_tolerance = 1e-12;

    std::vector<double> a_norm_errors;
    auto observer = [&](int, double) {
        std::vector<double> err(n);
        for (std::size_t i = 0; i < n; ++i) err[i] = x[i] - x_true[i];
        const auto Me = M.multiply(err);
        double e2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) e2 += err[i] * Me[i];
        a_norm_errors.push_back(std::sqrt(std::max(0.0, e2)));
    };
    conjugate_gradient(apply, nullptr, rhs.v.data(), x.data(), n, cfg, observer);
    REQUIRE(a_norm_errors.size() >= 2);
    for (std::size_t i = 1; i < a_norm_errors.size(); ++i)
        CHECK(a_norm_errors[i] <= a_norm_errors[i - 1] * (1.0 + 1e-9) + 1e-13);
}

TEST_CASE("modified corrector: constant medium has no corrector") {
    const TorusGrid g(2, 8);
    CoefficientField a(g, 0.5, 0.7);
    SolverConfig cfg;
    const CorrectorPair cp = modified_corrector(a, 50.0, 0, cfg);
    CHECK(max_abs(cp.phi) < 1e-12);
    for (std::size_t i = 0; i < g.sites(); ++i) {
        CHECK(std::fabs(cp.q.comp(0)[i] - 0.7) < 1e-12);
        CHECK(std::fabs(cp.q.comp(1)[i]) < 1e-12);
    }
}

TEST_CASE("laminate medium reproduces harmonic and arithmetic means") {
    const TorusGrid g(2, 8);
    const double c1 = 0.3, c2 = 0.9;
    const CoefficientField a = laminate(g, c1, c2);
    SolverConfig cfg;
    const double T = 1e6;

    std::vector<ExtendedCorrector> ecs;
    ecs.push_back(assemble_extended_corrector(a, T, 0, cfg));
    ecs.push_back(assemble_extended_corrector(a, T, 1, cfg));
    const Mat a_hT = homogenized_coefficient_a_hT(ecs);

    const double harmonic = 2.0 * c1 * c2 / (c1 + c2);
    const double arithmetic = 0.5 * (c1 + c2);
    CHECK(std::fabs(a_hT(0, 0) - harmonic) <= 1e-5);
    CHECK(std::fabs(a_hT(1, 1) - arithmetic) <= 1e-5);
    CHECK(std::fabs(a_hT(0, 1)) < 1e-8);
    CHECK(std::fabs(a_hT(1, 0)) < 1e-8);
}

TEST_CASE("corrector equation residual meets the solver tolerance") {
    const TorusGrid g(2, 4);
    const CoefficientField a = random_medium(g, 9);
    SolverConfig cfg;
    const CorrectorPair cp = modified_corrector(a, 10.0, 0, cfg);
    const ScalarField div_q = discrete_divergence(cp.q);
    double resid = 0.0;
    for (std::size_t i = 0; i < g.sites(); ++i)
        resid = std::max(resid, std::fabs(cp.phi.v[i] / 10.0 - div_q.v[i]));
    CHECK(resid <= 1e-8);
}

TEST_CASE("vector potential: constant flux, dense oracle, spectral residual") {
    const TorusGrid g(2, 8);
    const double T = 64.0;

    const SkewField zero = vector_potential(VectorField(g, 1.0), T);
    for (std::size_t i = 0; i < g.sites(); ++i) CHECK(std::fabs(zero.pair(0)[i]) < 1e-14);

    // synthetic q = (D_2 h, -D_1 h) from a single Fourier mode
    ScalarField h(g);
    const int k1 = 1, k2 = 2;
    for (std::size_t i = 0; i < g.sites(); ++i) {
        const auto x = g.coords(i);
        h.v[i] = std::sin(2.0 * M_PI * (k1 * x[0] + k2 * x[1]) / g.side);
    }
    const VectorField gh = discrete_gradient(h);
    VectorField q(g);
    kernels::copy(gh.comp(1), q.comp(0), g.sites());
    for (std::size_t i = 0; i < g.sites(); ++i) q.comp(1)[i] = -gh.comp(0)[i];

    const SkewField sigma = vector_potential(q, T);
    const ScalarField rhs = curl_rhs(q, 0, 1);
    const auto expect =
        oracle::lu_solve(oracle::massive_laplacian_matrix(g, 1.0 / T), rhs.v);
    std::vector<double> got(sigma.pair(0), sigma.pair(0) + g.sites());
    CHECK(max_abs_diff(got, expect) <= 1e-9 * std::max(1.0, max_abs_of(expect)));

    // spectral residual of the sigma equation
    CoefficientField ones(g, 0.5, 1.0);
    ScalarField s01(g), back(g);
    kernels::copy(sigma.pair(0), s01.v.data(), g.sites());
    kernels::apply_conductance(ones, s01.v.data(), back.v.data(), 1.0 / T, 1.0);
    CHECK(max_abs_diff(back.v, rhs.v) <= 1e-10 * std::max(1.0, max_abs_of(rhs.v)));
}

TEST_CASE("auxiliary field g_T: zero for constant media, residual on random") {
    const TorusGrid g(2, 8);
    const double T = 32.0;
    SolverConfig cfg;

    CoefficientField cmed(g, 0.5, 0.8);
    const CorrectorPair ccp = modified_corrector(cmed, T, 0, cfg);
    CHECK(max_abs(auxiliary_g(ccp.q, ccp.phi, T)) < 1e-12);

    const CoefficientField a = random_medium(g, 10);
    const CorrectorPair cp = modified_corrector(a, T, 0, cfg);
    const VectorField gT = auxiliary_g(cp.q, cp.phi, T);
    const auto mq = spatial_mean(cp.q);
    const VectorField gp = discrete_gradient(cp.phi);
    CoefficientField ones(g, 0.5, 1.0);
    for (int ax = 0; ax < 2; ++ax) {
        ScalarField gc(g), back(g);
        kernels::copy(gT.comp(ax), gc.v.data(), g.sites());
        kernels::apply_conductance(ones, gc.v.data(), back.v.data(), 1.0 / T, 1.0);
        std::vector<double> want(g.sites());
        for (std::size_t i = 0; i < g.sites(); ++i)
            want[i] = (cp.q.comp(ax)[i] - mq[ax] - gp.comp(ax)[i]) / T;
        CHECK(max_abs_diff(back.v, want) <= 1e-10 * std::max(1.0, max_abs_of(want)));
    }
}

TEST_CASE("extended corrector satisfies the Helmholtz identity") {
    SolverConfig cfg;
    for (int dim : {2, 3}) {
        const TorusGrid g(dim, dim == 2 ? 16 : 8);
        const CoefficientField a = random_medium(g, 11 + dim);
        const ExtendedCorrector ec = assemble_extended_corrector(a, 64.0, 0, cfg);
        CHECK(ec.helmholtz_residual <= 1e-7);
    }
    const TorusGrid g(2, 8);
    CoefficientField c(g, 0.5, 0.6);
    const ExtendedCorrector ec = assemble_extended_corrector(c, 64.0, 0, cfg);
    CHECK(ec.helmholtz_residual < 1e-12);
}

TEST_CASE("energy identity: (1/T)|phi|^2 + grad phi . a(grad phi + e) = 0") {
    const TorusGrid g(2, 16);
    const CoefficientField a = random_medium(g, 15);
    SolverConfig cfg;
    const double T = 64.0;
    const CorrectorPair cp = modified_corrector(a, T, 0, cfg);
    const VectorField gp = discrete_gradient(cp.phi);
    const double term1 = dot(cp.phi, cp.phi) / T;
    const double term2 = dot(gp, cp.q);
    CHECK(std::fabs(term1 + term2) <= 1e-7 * std::max(1.0, std::fabs(term2)));
}

TEST_CASE("a_hT is elliptic in both quadratic-form senses") {
    const TorusGrid g(2, 16);
    const CoefficientField a = random_medium(g, 16);
    SolverConfig cfg;
    const double T = 64.0;
    std::vector<ExtendedCorrector> ecs;
    for (int dir = 0; dir < 2; ++dir)
        ecs.push_back(assemble_extended_corrector(a, T, dir, cfg));
    const Mat a_hT = homogenized_coefficient_a_hT(ecs);

    for (int trial = 0; trial < 100; ++trial) {
        std::array<double, 3> xi{testutil::uniform01(90, trial) - 0.5,
                                 testutil::uniform01(91, trial) - 0.5, 0.0};
        const double norm2 = xi[0] * xi[0] + xi[1] * xi[1];
        const double form = quadratic_form(a_hT, xi);
        CHECK(form >= a.lambda * norm2 - 1e-9);
        const auto ax = a_hT.apply(xi);
        CHECK(form >= ax[0] * ax[0] + ax[1] * ax[1] - 1e-9);
    }

    CoefficientField cmed(g, 0.5, 0.6);
    std::vector<ExtendedCorrector> cecs;
    for (int dir = 0; dir < 2; ++dir)
        cecs.push_back(assemble_extended_corrector(cmed, T, dir, cfg));
    const Mat ch = homogenized_coefficient_a_hT(cecs);
    CHECK(std::fabs(ch(0, 0) - 0.6) <= 1e-10);
    CHECK(std::fabs(ch(1, 1) - 0.6) <= 1e-10);
    CHECK(std::fabs(ch(0, 1)) < 1e-12);
}

TEST_CASE("richardson extrapolation cancels expansion terms exactly") {
    CHECK(richardson_extrapolate(std::vector<double>{3.5}, 1) == 3.5);
    CHECK_THROWS_AS(richardson_extrapolate(std::vector<double>{1.0, 2.0}, 1), ParameterError);

    const double c0 = 1.7, c1 = -0.4, T = 8.0;
    auto f1 = [&](double t) { return c0 + c1 / t; };
    CHECK(std::fabs(richardson_extrapolate(std::vector<double>{f1(T), f1(2 * T)}, 2) - c0) <=
          1e-14);

    const double c2 = 0.9;
    auto f2 = [&](double t) { return c0 + c1 / t + c2 / (t * t); };
    CHECK(std::fabs(richardson_extrapolate(std::vector<double>{f2(T), f2(2 * T), f2(4 * T)},
                                           3) -
                    c0) <= 1e-12);
}

TEST_CASE("resolvent g_kappa: identities, limit, and lower bound") {
    CHECK(resolvent_g_kappa(0.0, 7.0, 1) == doctest::Approx(7.0));

    for (int kappa : {1, 2, 3})
        CHECK(std::fabs(resolvent_g_kappa(1.0, 1e6, kappa) - 1.0) <= 1e-5);

    double c_min = 1e300;
    for (int kappa : {1, 2, 3})
        for (double mu = 1e-4; mu <= 1.0 + 1e-12; mu *= 4.0)
            for (double T = 1.0; T <= 1e4 + 1.0; T *= 4.0) {
                const double gap = std::fabs(resolvent_g_kappa(mu, T, kappa) - 1.0 / mu);
                const double bound =
                    std::pow(T, -kappa) / (mu * std::pow(1.0 / T + mu, kappa));
                c_min = std::min(c_min, gap / bound);
            }
    CHECK(c_min > 0.01);
}

TEST_CASE("a_hT_kappa: constant media, discrete kappa=1 identity, self-convergence") {
    SolverConfig cfg;
    const TorusGrid g(2, 8);

    CoefficientField cmed(g, 0.5, 0.45);
    for (int kappa : {1, 2, 3}) {
        const Mat m = a_hT_kappa(cmed, 16.0, kappa, cfg);
        CHECK(std::fabs(m(0, 0) - 0.45) <= 1e-10);
        CHECK(std::fabs(m(1, 1) - 0.45) <= 1e-10);
    }

    // kappa = 1 equals the flux mean minus (1/T) <phi_j phi_i>, an exact
    // discrete consequence of testing the corrector equation with phi
    const CoefficientField a = random_medium(g, 19);
    const double T = 16.0;
    const Mat form = a_hT_kappa(a, T, 1, cfg);
    std::vector<ExtendedCorrector> ecs;
    for (int dir = 0; dir < 2; ++dir)
        ecs.push_back(assemble_extended_corrector(a, T, dir, cfg));
    const Mat flux_mean = homogenized_coefficient_a_hT(ecs);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const double gram =
                dot(ecs[j].phi_T, ecs[i].phi_T) / static_cast<double>(g.sites());
            CHECK(std::fabs(form(j, i) - (flux_mean(j, i) - gram / T)) <= 1e-7);
        }

    const TorusGrid g32(2, 32);
    const CoefficientField big = random_medium(g32, 20);
    const Mat ref = a_hT_kappa(big, 256.0, 3, cfg);
    const double e1 = (a_hT_kappa(big, 16.0, 2, cfg) - ref).frobenius_norm();
    const double e2 = (a_hT_kappa(big, 64.0, 2, cfg) - ref).frobenius_norm();
    CHECK(e2 < e1);
}

TEST_CASE("minimal radius: trivial fields, amplitude monotonicity, oracle") {
    const TorusGrid g(2, 64);
    const ScalarField zero_phi(g);
    const SkewField zero_sigma(g);
    CHECK(minimal_radius(zero_phi, zero_sigma, 0.01) == 1);

    ScalarField ramp(g);
    for (std::size_t i = 0; i < g.sites(); ++i)
        ramp.v[i] = std::sin(2.0 * M_PI * g.coords(i)[0] / g.side);
    ScalarField small = ramp, huge = ramp;
    for (double& v : small.v) v *= 1e-6;
    for (double& v : huge.v) v *= 1e6;
    CHECK(minimal_radius(small, zero_sigma, 0.01) == 1);
    CHECK(minimal_radius(huge, zero_sigma, 0.01) == g.side / 4);

    EnsembleSpec spec;
    const CoefficientField a = sample(spec, g, 23, 0);
    SolverConfig cfg;
    const double T = std::pow(g.side / 4.0, 2);
    const CorrectorPair cp = modified_corrector(a, T, 0, cfg);
    const SkewField sigma = vector_potential(cp.q, T);
    const double delta = 0.01;
    const int got = minimal_radius(cp.phi, sigma, delta);

    // brute-force evaluation of the definition over all dyadic (r, R)
    auto ball_oscillation = [&](int R) {
        double su = 0.0, squ = 0.0, ss = 0.0, sqs = 0.0, count = 0.0;
        for (int dy = -R; dy <= R; ++dy)
            for (int dx = -R; dx <= R; ++dx) {
                const std::size_t i = g.index({dx & g.mask(), dy & g.mask(), 0});
                su += cp.phi.v[i];
                squ += cp.phi.v[i] * cp.phi.v[i];
                ss += sigma.pair(0)[i];
                sqs += sigma.pair(0)[i] * sigma.pair(0)[i];
                count += 1.0;
            }
        const double vphi = squ / count - (su / count) * (su / count);
        const double vsig = sqs / count - (ss / count) * (ss / count);
        return vphi + vsig;
    };
    int expect = g.side / 4;
    for (int r = 1; r <= g.side / 4; r *= 2) {
        bool all_pass = true;
        for (int R = r; R <= g.side / 4; R *= 2)
            if (ball_oscillation(R) / (static_cast<double>(R) * R) > delta) all_pass = false;
        if (all_pass) {
            expect = r;
            break;
        }
    }
    CHECK(got == expect);
}
