#include "homog/cg.hpp"

#include <cmath>
#include <vector>

#include "homog/errors.hpp"
#include "homog/kernels.hpp"

namespace homog {

void SolverConfig::validate() const {
    if (!(rel_tolerance > 0.0 && rel_tolerance <= 1e-3))
        throw ParameterError("SolverConfig: rel_tolerance must lie in (0, 1e-3]");
    if (max_iterations != -1 && max_iterations < 1)
        throw ParameterError("SolverConfig: max_iterations must be >= 1 (or -1 for auto)");
}

CgStats conjugate_gradient(const std::function<void(const double*, double*)>& apply_op,
                           const double* inv_diag, const double* rhs, double* x, std::size_t n,
                           const SolverConfig& cfg,
                           const std::function<void(int, double)>& observer) {
    cfg.validate();
    const int max_iter =
        cfg.max_iterations == -1 ? static_cast<int>(10 * n) : cfg.max_iterations;

    const double bnorm = std::sqrt(kernels::block_dot(rhs, rhs, n));
    CgStats stats;
    if (bnorm == 0.0) {
        for (std::size_t i = 0; i < n; ++i) x[i] = 0.0;
        return stats;
    }

    std::vector<double> r(n), z(n), p(n), Ap(n);
    apply_op(x, Ap.data());
    for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - Ap[i];

    auto precondition = [&](const std::vector<double>& in, std::vector<double>& out) {
        if (inv_diag) {
#pragma omp parallel for schedule(static)
            for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
                out[i] = inv_diag[i] * in[i];
        } else {
            kernels::copy(in.data(), out.data(), n);
        }
    };

    precondition(r, z);
    kernels::copy(z.data(), p.data(), n);
    double rz = kernels::block_dot(r.data(), z.data(), n);
    double rnorm = std::sqrt(kernels::block_dot(r.data(), r.data(), n));

    for (int it = 0; it < max_iter; ++it) {
        if (rnorm <= cfg.rel_tolerance * bnorm) {
            stats.iterations = it;
            stats.rel_residual = rnorm / bnorm;
            return stats;
        }
        apply_op(p.data(), Ap.data());
        const double pAp = kernels::block_dot(p.data(), Ap.data(), n);
        const double alpha = rz / pAp;
        kernels::axpy(alpha, p.data(), x, n);
        kernels::axpy(-alpha, Ap.data(), r.data(), n);
        precondition(r, z);
        const double rz_next = kernels::block_dot(r.data(), z.data(), n);
        kernels::xpay(z.data(), rz_next / rz, p.data(), n);
        rz = rz_next;
        rnorm = std::sqrt(kernels::block_dot(r.data(), r.data(), n));
        if (observer) observer(it + 1, rnorm);
    }
    if (rnorm <= cfg.rel_tolerance * bnorm) {
        stats.iterations = max_iter;
        stats.rel_residual = rnorm / bnorm;
        return stats;
    }
    throw ConvergenceError("conjugate_gradient: iteration cap reached", rnorm / bnorm, max_iter);
}

ScalarField solve_massive_elliptic(const CoefficientField& a, double T, const ScalarField& rhs,
                                   const SolverConfig& cfg, CgStats* stats,
                                   const ScalarField* initial_guess) {
    if (!(T > 0.0)) throw ParameterError("solve_massive_elliptic: T must be positive");
    const std::size_t n = a.grid.sites();
    const double mass = 1.0 / T;

    ScalarField x = initial_guess ? *initial_guess : ScalarField(a.grid);

    std::vector<double> inv_diag;
    if (cfg.precond == Preconditioner::diagonal_mass) {
        inv_diag.resize(n);
        kernels::conductance_diagonal(a, inv_diag.data(), mass, 1.0);
        for (std::size_t i = 0; i < n; ++i) inv_diag[i] = 1.0 / inv_diag[i];
    }

    auto apply = [&](const double* in, double* out) {
        kernels::apply_conductance(a, in, out, mass, 1.0);
    };
    CgStats s = conjugate_gradient(apply, inv_diag.empty() ? nullptr : inv_diag.data(),
                                   rhs.v.data(), x.v.data(), n, cfg);
    if (stats) *stats = s;
    return x;
}

} // namespace homog
