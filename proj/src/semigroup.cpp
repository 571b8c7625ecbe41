#include "homog/semigroup.hpp"

#include <cmath>

#include "homog/errors.hpp"
#include "homog/kernels.hpp"
#include "homog/ops.hpp"

namespace homog {
namespace {

constexpr double kGridEps = 1e-9;

bool near(double a, double b) { return std::fabs(a - b) <= kGridEps * std::max(1.0, b); }

// Start of the dyadic span (s, 2s] (or (0, 1]) containing tau.
double span_start(double tau) {
    if (tau <= 1.0) return 0.0;
    double s = 1.0;
    while (s * 2.0 < tau) s *= 2.0;
    return s;
}

} // namespace

std::vector<double> substep_times(double t_from, double t_to, int steps_per_dyad) {
    if (steps_per_dyad < 4) throw ParameterError("steps_per_dyad must be >= 4");
    if (!(t_from >= 0.0) || !(t_to > t_from)) throw ParameterError("bad time interval");
    std::vector<double> out;
    double t = t_from;
    while (!near(t, t_to)) {
        const double s0 = span_start(t + kGridEps);
        const double s1 = s0 == 0.0 ? 1.0 : 2.0 * s0;
        const double dt = (s1 - s0) / steps_per_dyad;
        // locate current substep index inside span, advance one substep
        const double k = std::round((t - s0) / dt);
        if (std::fabs(t - (s0 + k * dt)) > kGridEps * std::max(1.0, t))
            throw ParameterError("time not on the dyadic-aligned step grid");
        double next = s0 + (k + 1.0) * dt;
        if (next > t_to + kGridEps) throw ParameterError("time not on the dyadic-aligned step grid");
        out.push_back(next);
        t = next;
    }
    return out;
}

bool is_on_step_grid(double t, int steps_per_dyad) {
    if (t < 0.0) return false;
    if (near(t, 0.0)) return true;
    const double s0 = span_start(t - kGridEps * std::max(1.0, t));
    const double s1 = s0 == 0.0 ? 1.0 : 2.0 * s0;
    const double dt = (s1 - s0) / steps_per_dyad;
    const double k = std::round((t - s0) / dt);
    return std::fabs(t - (s0 + k * dt)) <= kGridEps * std::max(1.0, t);
}

std::vector<double> dyadic_times(double t_max) {
    if (!(t_max >= 1.0)) throw ParameterError("dyadic_times: t_max must be >= 1");
    std::vector<double> out{0.0};
    for (double t = 1.0; t <= t_max + kGridEps; t *= 2.0) out.push_back(t);
    if (!near(out.back(), t_max))
        throw ParameterError("dyadic_times: t_max must be a power of two");
    return out;
}

std::size_t SemigroupTrajectory::index_of(double t) const {
    for (std::size_t i = 0; i < times.size(); ++i)
        if (near(times[i], t)) return i;
    throw ParameterError("SemigroupTrajectory: time not stored");
}

VectorField SemigroupTrajectory::q_at(double t) const {
    return flux(a, phi_at(t), direction);
}

SemigroupTrajectory evolve_semigroup(const CoefficientField& a, int direction, double t_max,
                                     int steps_per_dyad, const SolverConfig& cfg,
                                     YoshidaAccumulator* yoshida) {
    SemigroupTrajectory traj;
    traj.a = a;
    traj.direction = direction;
    traj.steps_per_dyad = steps_per_dyad;
    traj.times = dyadic_times(t_max);

    const TorusGrid& g = a.grid;
    const std::size_t n = g.sites();

    ScalarField u = divergence_of_a_e(a, direction); // u(0) = div(a e)
    ScalarField phi(g);
    traj.u.push_back(u);
    traj.phi.push_back(phi);

    if (yoshida) {
        if (!(yoshida->T > 0.0)) throw ParameterError("YoshidaAccumulator: T must be positive");
        yoshida->phi_quad = ScalarField(g);
        yoshida->q_quad = VectorField(g);
    }

    std::vector<double> inv_diag(n), rhs(n), u_next(n);
    std::size_t next_store = 1;
    double t = 0.0;

    const std::vector<double> steps = substep_times(0.0, t_max, steps_per_dyad);
    for (double t_next : steps) {
        const double dt = t_next - t;

        // (1 + (dt/2) A) u_next = (1 - (dt/2) A) u, warm-started from u.
        kernels::apply_conductance(a, u.v.data(), rhs.data(), 1.0, -0.5 * dt);
        kernels::conductance_diagonal(a, inv_diag.data(), 1.0, 0.5 * dt);
        for (std::size_t i = 0; i < n; ++i) inv_diag[i] = 1.0 / inv_diag[i];
        kernels::copy(u.v.data(), u_next.data(), n);
        auto apply = [&](const double* in, double* out) {
            kernels::apply_conductance(a, in, out, 1.0, 0.5 * dt);
        };
        const CgStats st = conjugate_gradient(apply, inv_diag.data(), rhs.data(), u_next.data(),
                                              n, cfg);
        traj.max_cg_residual = std::max(traj.max_cg_residual, st.rel_residual);

        if (yoshida) {
            // trapezoid of exp(-tau/T) u(tau) and of (1/T) exp(-tau/T) q(tau)
            const double w0 = std::exp(-t / yoshida->T);
            const double w1 = std::exp(-t_next / yoshida->T);
            kernels::axpy(0.5 * dt * w0, u.v.data(), yoshida->phi_quad.v.data(), n);
            kernels::axpy(0.5 * dt * w1, u_next.data(), yoshida->phi_quad.v.data(), n);
            const VectorField q0 = flux(a, phi, direction);
            kernels::axpy(0.5 * dt * w0 / yoshida->T, q0.v.data(), yoshida->q_quad.v.data(),
                          q0.v.size());
        }

        // matched trapezoid for phi
        kernels::axpy(0.5 * dt, u.v.data(), phi.v.data(), n);
        kernels::axpy(0.5 * dt, u_next.data(), phi.v.data(), n);
        kernels::copy(u_next.data(), u.v.data(), n);
        t = t_next;

        if (yoshida) {
            const VectorField q1 = flux(a, phi, direction);
            const double w1 = std::exp(-t / yoshida->T);
            kernels::axpy(0.5 * dt * w1 / yoshida->T, q1.v.data(), yoshida->q_quad.v.data(),
                          q1.v.size());
        }

        if (next_store < traj.times.size() &&
            std::fabs(t - traj.times[next_store]) <= kGridEps * std::max(1.0, t)) {
            traj.u.push_back(u);
            traj.phi.push_back(phi);
            ++next_store;
        }
    }
    if (next_store != traj.times.size())
        throw ConsistencyError("evolve_semigroup: stepping missed a dyadic checkpoint");
    // Yoshida tails beyond t_max are O(e^{-t_max/T}) and belong to the
    // caller's quadrature budget.
    return traj;
}

} // namespace homog
