#pragma once

#include <array>

#include "homog/field.hpp"
#include "homog/kernels.hpp"

// Discrete calculus on the torus. Conventions (fixed once, everything
// downstream depends on them):
//   * gradient: forward differences, (grad u)_i(x) = u(x+e_i) - u(x);
//   * divergence: backward differences, the exact negative adjoint of the
//     gradient, so summation by parts holds to machine precision;
//   * edge fields are centered to sites at the edge tail, and curl_rhs applies
//     the same forward differences to those site-centered components.
// With these choices all mixed differences commute and the Helmholtz
// decomposition of the flux is an exact identity per realization.

namespace homog {

inline VectorField discrete_gradient(const ScalarField& u) {
    VectorField out(u.grid);
    kernels::gradient(u, out);
    return out;
}

inline ScalarField discrete_divergence(const VectorField& f) {
    ScalarField out(f.grid);
    kernels::divergence(f, out);
    return out;
}

// D_j q_k - D_k q_j with forward differences on the site-centered components;
// the right-hand side of the vector-potential equation.
ScalarField curl_rhs(const VectorField& q, int j, int k);

// (div sigma)_j = sum_k D^-_k sigma_{jk} (backward differences, matching the
// divergence convention; sigma_{jk} = -sigma_{kj} is expanded on the fly).
VectorField sigma_divergence(const SkewField& sigma);

// mass*u + (-div a grad u) as a field op (CG and tests use the kernel directly).
ScalarField apply_massive_operator(const CoefficientField& a, const ScalarField& u, double mass);

// q = a (grad phi + e) for a unit direction index e.
VectorField flux(const CoefficientField& a, const ScalarField& phi, int direction);

// div(a e_direction), the right-hand side of the corrector equation.
ScalarField divergence_of_a_e(const CoefficientField& a, int direction);

double spatial_mean(const ScalarField& f);
std::array<double, 3> spatial_mean(const VectorField& f); // per component; unused tail = 0

double dot(const ScalarField& x, const ScalarField& y);
double dot(const VectorField& x, const VectorField& y);
double nrm2(const ScalarField& x);
double nrm2(const VectorField& x);
double max_abs(const ScalarField& x);
double max_abs(const VectorField& x);

} // namespace homog
