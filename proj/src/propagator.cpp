#include "homog/propagator.hpp"

#include <cmath>

#include "homog/errors.hpp"
#include "homog/fft.hpp"
#include "homog/kernels.hpp"
#include "homog/ops.hpp"

namespace homog {

VectorField propagate_S(const CoefficientField& a, const VectorField& q0, double t, double T,
                        int steps_per_dyad, const SolverConfig& cfg) {
    if (!(t >= 0.0) || !(T > t)) throw ParameterError("propagate_S: need 0 <= t < T");
    if (!is_on_step_grid(t, steps_per_dyad) || !is_on_step_grid(T, steps_per_dyad))
        throw ParameterError("propagate_S: endpoints must lie on the dyadic step grid");

    const TorusGrid& g = a.grid;
    const std::size_t n = g.sites();
    ScalarField v = discrete_divergence(q0);
    VectorField out = q0;

    std::vector<double> inv_diag(n), rhs(n), v_next(n);
    VectorField grad_v(g);

    double tau = t;
    for (double tau_next : substep_times(t, T, steps_per_dyad)) {
        const double dt = tau_next - tau;
        kernels::apply_conductance(a, v.v.data(), rhs.data(), 1.0, -0.5 * dt);
        kernels::conductance_diagonal(a, inv_diag.data(), 1.0, 0.5 * dt);
        for (std::size_t i = 0; i < n; ++i) inv_diag[i] = 1.0 / inv_diag[i];
        kernels::copy(v.v.data(), v_next.data(), n);
        auto apply = [&](const double* in, double* out_) {
            kernels::apply_conductance(a, in, out_, 1.0, 0.5 * dt);
        };
        conjugate_gradient(apply, inv_diag.data(), rhs.data(), v_next.data(), n, cfg);

        // matched trapezoid of a grad v: out += (dt/2) a grad(v + v_next)
        kernels::gradient(v, grad_v);
        for (int ax = 0; ax < g.dim; ++ax) {
            const double* ac = a.comp(ax);
            const double* gv = grad_v.comp(ax);
            double* oc = out.comp(ax);
#pragma omp parallel for schedule(static)
            for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
                oc[i] += 0.5 * dt * ac[i] * gv[i];
        }
        kernels::copy(v_next.data(), v.v.data(), n);
        kernels::gradient(v, grad_v);
        for (int ax = 0; ax < g.dim; ++ax) {
            const double* ac = a.comp(ax);
            const double* gv = grad_v.comp(ax);
            double* oc = out.comp(ax);
#pragma omp parallel for schedule(static)
            for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
                oc[i] += 0.5 * dt * ac[i] * gv[i];
        }
        tau = tau_next;
    }
    return out;
}

VectorField propagate_S_hom(const Mat& a_const, const VectorField& q0, double t, double T) {
    const bool to_infinity = std::isinf(T);
    if (!(t >= 0.0) || (!to_infinity && !(T >= t)))
        throw ParameterError("propagate_S_hom: need 0 <= t <= T");
    const TorusGrid& g = q0.grid;
    if (a_const.dim != g.dim) throw ParameterError("propagate_S_hom: dimension mismatch");
    const std::size_t n = g.sites();

    std::vector<std::vector<cplx>> qh(static_cast<std::size_t>(g.dim));
    for (int ax = 0; ax < g.dim; ++ax) {
        qh[static_cast<std::size_t>(ax)].assign(n, cplx(0.0, 0.0));
        const double* qc = q0.comp(ax);
        for (std::size_t i = 0; i < n; ++i) qh[static_cast<std::size_t>(ax)][i] = qc[i];
        fft_forward(g, qh[static_cast<std::size_t>(ax)]);
    }

    const double dt_total = to_infinity ? 0.0 : T - t;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t is = 0; is < static_cast<std::ptrdiff_t>(n); ++is) {
        const std::size_t i = static_cast<std::size_t>(is);
        std::array<cplx, 3> m{};
        for (int ax = 0; ax < g.dim; ++ax) m[ax] = forward_diff_symbol(g, i, ax);

        // lambda(k) = sum_jl conj(m_j) A_jl m_l, real and >= 0 for SPD A.
        cplx lam_c(0.0, 0.0);
        for (int j = 0; j < g.dim; ++j)
            for (int l = 0; l < g.dim; ++l) lam_c += std::conj(m[j]) * a_const(j, l) * m[l];
        const double lam = lam_c.real();

        // v0_hat = (div q0)^ = sum_j (1 - e^{-i theta_j}) q_j^ = sum_j -conj(m_j) q_j^
        cplx v0(0.0, 0.0);
        for (int j = 0; j < g.dim; ++j) v0 += -std::conj(m[j]) * qh[static_cast<std::size_t>(j)][i];

        double integral;
        if (lam <= 1e-300)
            integral = to_infinity ? 0.0 : dt_total;
        else if (to_infinity)
            integral = 1.0 / lam;
        else
            integral = (1.0 - std::exp(-lam * dt_total)) / lam;

        // q_j += (A grad v)_j integrated: (sum_l A_jl m_l) v0 * integral
        for (int j = 0; j < g.dim; ++j) {
            cplx am(0.0, 0.0);
            for (int l = 0; l < g.dim; ++l) am += a_const(j, l) * m[l];
            qh[static_cast<std::size_t>(j)][i] += am * v0 * integral;
        }
    }

    VectorField out(g);
    for (int ax = 0; ax < g.dim; ++ax) {
        fft_inverse(g, qh[static_cast<std::size_t>(ax)]);
        double* oc = out.comp(ax);
        for (std::size_t i = 0; i < n; ++i) oc[i] = qh[static_cast<std::size_t>(ax)][i].real();
    }
    return out;
}

VectorField commutator_field(const VectorField& q_t, const VectorField& grad_phi_t,
                             const Mat& abar, int direction) {
    const TorusGrid& g = q_t.grid;
    if (abar.dim != g.dim) throw ParameterError("commutator_field: dimension mismatch");
    VectorField xi(g);
    const std::size_t n = g.sites();
    for (int j = 0; j < g.dim; ++j) {
        double* xj = xi.comp(j);
        const double* qj = q_t.comp(j);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t is = 0; is < static_cast<std::ptrdiff_t>(n); ++is) {
            const std::size_t i = static_cast<std::size_t>(is);
            double corr = abar(j, direction); // abar e, the unit-vector part
            for (int l = 0; l < g.dim; ++l) corr += abar(j, l) * grad_phi_t.comp(l)[i];
            xj[i] = qj[i] - corr;
        }
    }
    return xi;
}

VectorField homogenization_error(const SemigroupTrajectory& traj, double t, double T,
                                 const Mat& a_const) {
    const VectorField qT = traj.q_at(T);
    if (traj.index_of(t) == traj.index_of(T)) {
        VectorField zero(traj.a.grid);
        return zero; // q(T) - q(T)
    }
    const VectorField propagated = propagate_S_hom(a_const, traj.q_at(t), t, T);
    VectorField out = qT;
    kernels::axpy(-1.0, propagated.v.data(), out.v.data(), out.v.size());
    return out;
}

} // namespace homog
