#pragma once

#include <limits>

#include "homog/cg.hpp"
#include "homog/field.hpp"
#include "homog/semigroup.hpp"
#include "homog/smallmat.hpp"

// Flux propagators:
//   S_{t->T} q0 = q0 + int_t^T a grad v,   dv/dtau = div(a grad v), v(t) = div q0,
// and its constant-coefficient analogue S^hom computed spectrally (exact in
// time). S^hom with T = infinity is the Leray projection onto discretely
// divergence-free fields with respect to the constant metric.

namespace homog {

inline constexpr double kTimeInfinity = std::numeric_limits<double>::infinity();

// Heterogeneous propagator, Crank-Nicolson on the shared dyadic step grid; t
// and T must lie on that grid so that compositions share substeps exactly.
VectorField propagate_S(const CoefficientField& a, const VectorField& q0, double t, double T,
                        int steps_per_dyad, const SolverConfig& cfg);

// Constant-coefficient propagator; a_const must be elliptic (symmetric
// positive definite). T = kTimeInfinity yields the Leray projection.
VectorField propagate_S_hom(const Mat& a_const, const VectorField& q0, double t, double T);

// Homogenization commutator Xi(t) e = q(t) - abar (grad phi(t) + e), with the
// centering matrix abar supplied by the caller (cross-sample mean of the flux
// columns, so ensemble averages of Xi vanish identically).
VectorField commutator_field(const VectorField& q_t, const VectorField& grad_phi_t,
                             const Mat& abar, int direction);

// Theorem-level homogenization error q(T) - S^hom_{t->T} q(t) along a stored
// trajectory.
VectorField homogenization_error(const SemigroupTrajectory& traj, double t, double T,
                                 const Mat& a_const);

} // namespace homog
