#pragma once

#include <optional>
#include <vector>

#include "homog/cg.hpp"
#include "homog/field.hpp"

// Parabolic flow  du/dt = div(a grad u),  u(0) = div(a e),  with
// phi(t) = int_0^t u and q(t) = a(grad phi(t) + e).
//
// Time stepping is Crank-Nicolson on dyadic spans (0,1], (1,2], (2,4], ...,
// each divided into steps_per_dyad uniform substeps, with phi accumulated by
// the matched trapezoid rule. That combination turns the paper-level relations
//   u(t) = div q(t)   and   S_{t1,t2} S_{t0,t1} = S_{t0,t2}
// into exact discrete identities (up to the inner CG tolerance), rather than
// O(dt) approximations.

namespace homog {

// All substep times in (t_from, t_to] induced by the global dyadic spans.
std::vector<double> substep_times(double t_from, double t_to, int steps_per_dyad);
// Dyadic checkpoint times 0, 1, 2, 4, ..., t_max.
std::vector<double> dyadic_times(double t_max);
bool is_on_step_grid(double t, int steps_per_dyad);

// Optional on-the-fly accumulators for the Yoshida representations
//   phi_T = int_0^inf exp(-tau/T) u(tau) dtau,
//   q_T   = int_0^inf (dt/T) exp(-t/T) q(t) dt,
// evaluated by the same matched trapezoid rule along the trajectory.
struct YoshidaAccumulator {
    double T = 0.0;
    ScalarField phi_quad;
    VectorField q_quad;
};

struct SemigroupTrajectory {
    CoefficientField a;
    int direction = 0;
    int steps_per_dyad = 16;
    std::vector<double> times;       // 0, 1, 2, 4, ..., t_max
    std::vector<ScalarField> u;      // u at each stored time
    std::vector<ScalarField> phi;    // phi at each stored time
    double max_cg_residual = 0.0;

    std::size_t index_of(double t) const; // exact lookup, parameter error if absent
    const ScalarField& u_at(double t) const { return u[index_of(t)]; }
    const ScalarField& phi_at(double t) const { return phi[index_of(t)]; }
    VectorField q_at(double t) const; // a (grad phi(t) + e)
};

SemigroupTrajectory evolve_semigroup(const CoefficientField& a, int direction, double t_max,
                                     int steps_per_dyad, const SolverConfig& cfg,
                                     YoshidaAccumulator* yoshida = nullptr);

} // namespace homog
