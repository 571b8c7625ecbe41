#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "homog/errors.hpp"
#include "homog/fft.hpp"
#include "homog/kernels.hpp"
#include "homog/mollify.hpp"
#include "homog/ops.hpp"
#include "homog/serialize.hpp"
#include "support/dense_oracle.hpp"
#include "support/test_util.hpp"

using namespace homog;
using testutil::max_abs_diff;
using testutil::max_abs_of;

TEST_CASE("grid invariants") {
    CHECK_THROWS_AS(TorusGrid(4, 8), ParameterError);  // bad dimension
    CHECK_THROWS_AS(TorusGrid(2, 12), ParameterError); // not a power of two
    const TorusGrid g(2, 8);
    CHECK(g.sites() == 64);
    CHECK(g.edges() == 128);
    for (std::size_t i = 0; i < g.sites(); ++i)
        for (int ax = 0; ax < 2; ++ax) CHECK(g.shift_down(g.shift_up(i, ax), ax) == i);
}

TEST_CASE("gradient of a constant vanishes") {
    const TorusGrid g(2, 8);
    ScalarField u(g, 3.25);
    CHECK(max_abs(discrete_gradient(u)) == 0.0);
}

TEST_CASE("gradient of a single-site indicator hits the four incident edges") {
    const TorusGrid g(2, 4);
    ScalarField u(g);
    const std::size_t x0 = g.index({1, 2, 0});
    u.v[x0] = 1.0;
    const VectorField grad = discrete_gradient(u);
    int plus = 0, minus = 0, other = 0;
    for (double v : grad.v) {
        if (v == 1.0)
            ++plus;
        else if (v == -1.0)
            ++minus;
        else if (v != 0.0)
            ++other;
    }
    CHECK(plus == 2);  // edges arriving at x0 (tails at x0 - e_i)
    CHECK(minus == 2); // edges leaving x0
    CHECK(other == 0);
}

TEST_CASE("gradient and divergence match the dense difference matrix") {
    const TorusGrid g(2, 4);
    const ScalarField u = testutil::random_scalar(g, 11);
    const auto D = oracle::difference_matrix(g);
    CHECK(max_abs_diff(discrete_gradient(u).v, D.multiply(u.v)) <= 1e-14);

    const VectorField f = testutil::random_vector(g, 12);
    std::vector<double> minus_DtF = oracle::difference_matrix(g).transposed().multiply(f.v);
    for (double& v : minus_DtF) v = -v;
    const ScalarField div = discrete_divergence(f);
    CHECK(max_abs_diff(div.v, minus_DtF) <= 1e-14);

    CHECK(max_abs(discrete_divergence(VectorField(g, 2.0))) == 0.0);
    CHECK(std::fabs(kernels::block_sum(div.v.data(), div.v.size())) < 1e-12);
}

TEST_CASE("summation by parts is exact") {
    for (int dim : {2, 3}) {
        const TorusGrid g(dim, 8);
        const ScalarField u = testutil::random_scalar(g, 21);
        const VectorField f = testutil::random_vector(g, 22);
        const double lhs = dot(discrete_gradient(u), f);
        const double rhs = -dot(u, discrete_divergence(f));
        CHECK(std::fabs(lhs - rhs) <= 1e-12 * std::max(1.0, std::fabs(lhs)));
    }
}

TEST_CASE("mixed forward differences commute exactly") {
    const TorusGrid g(2, 8);
    const ScalarField u = testutil::random_scalar(g, 31);
    const ScalarField defect = curl_rhs(discrete_gradient(u), 0, 1);
    CHECK(max_abs(defect) == 0.0);
}

TEST_CASE("curl_rhs matches dense difference operators and rejects j == k") {
    const TorusGrid g(2, 4);
    const VectorField q = testutil::random_vector(g, 41);
    CHECK_THROWS_AS(curl_rhs(q, 1, 1), ParameterError);

    const ScalarField r = curl_rhs(q, 0, 1);
    const auto D = oracle::difference_matrix(g);
    const std::size_t n = g.sites();
    std::vector<double> expect(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            expect[i] += D(0 * n + i, j) * q.comp(1)[j];
            expect[i] -= D(1 * n + i, j) * q.comp(0)[j];
        }
    CHECK(max_abs_diff(r.v, expect) <= 1e-14);

    CHECK(max_abs(curl_rhs(VectorField(g, 1.5), 0, 1)) == 0.0);
}

TEST_CASE("poisson solve matches the dense oracle on random rhs") {
    for (int dim : {2, 3}) {
        const TorusGrid g(dim, dim == 2 ? 8 : 4);
        const ScalarField rhs = testutil::random_scalar(g, 51);
        const double mass = 0.1;
        const ScalarField u = fft_poisson_solve(mass, rhs);
        const auto expect = oracle::lu_solve(oracle::massive_laplacian_matrix(g, mass), rhs.v);
        CHECK(max_abs_diff(u.v, expect) <= 1e-9 * std::max(1.0, max_abs_of(expect)));
    }
}

TEST_CASE("poisson solve is exact on a Fourier mode and inverts the operator") {
    const TorusGrid g(2, 8);
    ScalarField rhs(g);
    const double k1 = 1.0, k2 = 3.0;
    for (std::size_t i = 0; i < g.sites(); ++i) {
        const auto x = g.coords(i);
        rhs.v[i] = std::cos(2.0 * M_PI * (k1 * x[0] + k2 * x[1]) / g.side);
    }
    const double mass = 0.25;
    const double lam = 4.0 * std::pow(std::sin(M_PI * k1 / g.side), 2) +
                       4.0 * std::pow(std::sin(M_PI * k2 / g.side), 2);
    const ScalarField u = fft_poisson_solve(mass, rhs);
    std::vector<double> expect = rhs.v;
    for (double& v : expect) v /= mass + lam;
    CHECK(max_abs_diff(u.v, expect) <= 1e-10);

    // (mass - Lap) o solve = identity within 1e-10
    CoefficientField ones(g, 0.5, 1.0);
    ScalarField back(g);
    kernels::apply_conductance(ones, u.v.data(), back.v.data(), mass, 1.0);
    CHECK(max_abs_diff(back.v, rhs.v) <= 1e-10);

    CHECK(max_abs(fft_poisson_solve(0.3, ScalarField(g))) == 0.0);
    CHECK_THROWS_AS(fft_poisson_solve(0.0, ScalarField(g, 1.0)), ParameterError);
}

TEST_CASE("mollifier: unit mass, mean preservation, max-norm contraction") {
    const TorusGrid g(2, 32);
    ScalarField c(g, 2.5);
    const ScalarField mc = gaussian_mollify(c, 2.0);
    CHECK(max_abs_diff(mc.v, c.v) <= 1e-13);

    const ScalarField f = testutil::random_scalar(g, 61);
    const ScalarField mf = gaussian_mollify(f, 3.0);
    CHECK(std::fabs(spatial_mean(mf) - spatial_mean(f)) <=
          1e-12 * std::max(1.0, std::fabs(spatial_mean(f))));
    CHECK(max_abs(mf) <= max_abs(f) + 1e-14);

    CHECK_THROWS_AS(gaussian_mollify(f, 5.0), ParameterError); // R > L/8
    CHECK_THROWS_AS(gaussian_mollify(f, -1.0), ParameterError);
}

TEST_CASE("mollifier semigroup property within 1e-10") {
    const TorusGrid g(2, 32);
    const ScalarField f = testutil::random_scalar(g, 62);
    const double R = 2.0, r = 2.0;
    const ScalarField two_step = gaussian_mollify(gaussian_mollify(f, R), r);
    const ScalarField one_step = gaussian_mollify(f, std::sqrt(R * R + r * r));
    CHECK(max_abs_diff(two_step.v, one_step.v) <= 1e-10 * std::max(1.0, max_abs(one_step)));
}

TEST_CASE("mollified delta matches the directly summed wrapped Gaussian") {
    const TorusGrid g(2, 32);
    ScalarField delta(g);
    delta.v[g.index({0, 0, 0})] = 1.0;
    const double R = 2.0;
    const ScalarField m = gaussian_mollify(delta, R);
    const ScalarField ker = wrapped_gaussian_kernel(g, R);
    CHECK(max_abs_diff(m.v, ker.v) <= 1e-13 * max_abs(ker));

    double total = 0.0;
    for (double v : ker.v) total += v;
    CHECK(std::fabs(total - 1.0) <= 1e-14);
}

TEST_CASE("field binaries round-trip through the HLF1 format") {
    const TorusGrid g(2, 8);
    const VectorField f = testutil::random_vector(g, 81);
    homog::save_field("roundtrip.hlf", f);
    const homog::LoadedField back = homog::load_field("roundtrip.hlf");
    CHECK(back.grid.dim == 2);
    CHECK(back.grid.side == 8);
    CHECK(back.n_comp == 2);
    CHECK(back.data == f.v);
    CHECK_THROWS_AS(homog::load_field("no-such-file.hlf"), homog::IoError);
}

TEST_CASE("parallel kernels agree bitwise with the serial reference") {
    const TorusGrid g(2, 16);
    CoefficientField a(g, 0.25);
    for (std::size_t i = 0; i < a.cond.size(); ++i)
        a.cond[i] = 0.25 + 0.75 * testutil::uniform01(71, i);
    const ScalarField u = testutil::random_scalar(g, 72);

    ScalarField out_par(g), out_ser(g);
    kernels::apply_conductance(a, u.v.data(), out_par.v.data(), 0.5, 1.0);
    serial_ref::apply_conductance(a, u.v.data(), out_ser.v.data(), 0.5, 1.0);
    CHECK(out_par.v == out_ser.v);

    CHECK(kernels::block_dot(u.v.data(), out_par.v.data(), g.sites()) ==
          serial_ref::block_dot(u.v.data(), out_ser.v.data(), g.sites()));

    VectorField gp(g), gs(g);
    kernels::gradient(u, gp);
    serial_ref::gradient(u, gs);
    CHECK(gp.v == gs.v);

    ScalarField dp(g), ds(g);
    kernels::divergence(gp, dp);
    serial_ref::divergence(gs, ds);
    CHECK(dp.v == ds.v);
}
