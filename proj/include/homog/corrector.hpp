#pragma once

#include <vector>

#include "homog/cg.hpp"
#include "homog/field.hpp"
#include "homog/smallmat.hpp"

// Massive (Yoshida-regularized) corrector machinery:
//
//   (1/T) phi_T - div( a (grad phi_T + e) ) = 0          -> phi_T, q_T
//   (1/T) sigma_Tjk - Lap sigma_Tjk = D_j q_Tk - D_k q_Tj -> sigma_T
//   (1 - T Lap) g_T = q_T - <q_T> - grad phi_T            -> g_T
//
// with the torus spatial average standing in for the ensemble mean inside
// per-realization identities. The three solves satisfy the exact discrete
// Helmholtz decomposition  q_T = a_hT e + div sigma_T + g_T  up to solver
// tolerance, which assemble_extended_corrector verifies before returning.

namespace homog {

struct CorrectorPair {
    ScalarField phi;
    VectorField q;
    CgStats cg;
};

// Solves the corrector equation rewritten as ((1/T) + A) phi = div(a e).
CorrectorPair modified_corrector(const CoefficientField& a, double T, int direction,
                                 const SolverConfig& cfg);

// Skew vector potential of the flux, solved spectrally componentwise.
SkewField vector_potential(const VectorField& q_T, double T);

// Defect field g_T making the Helmholtz decomposition exact.
VectorField auxiliary_g(const VectorField& q_T, const ScalarField& phi_T, double T);

struct ExtendedCorrector {
    double T = 0.0;
    int direction = 0;
    ScalarField phi_T;
    VectorField q_T;
    SkewField sigma_T;
    VectorField g_T;
    std::array<double, 3> a_hT_column{0.0, 0.0, 0.0}; // spatial mean of q_T
    double cg_rel_residual = 0.0;
    double helmholtz_residual = 0.0; // max-norm, relative to max|q_T|
};

ExtendedCorrector assemble_extended_corrector(const CoefficientField& a, double T, int direction,
                                              const SolverConfig& cfg);

// a_hT e_i := <q_Ti>, one corrector per coordinate direction.
Mat homogenized_coefficient_a_hT(const std::vector<ExtendedCorrector>& correctors);

// Richardson-extrapolated approximation (kappa fields at T, 2T, ..., 2^(k-1) T):
//   e_j . a_hT^k e_i = < (grad phi_Tj^k + e_j) . a (grad phi_Ti^k + e_i) >.
// The coefficient model is symmetric, so the adjoint corrector equals phi.
Mat a_hT_kappa(const CoefficientField& a, double T, int kappa, const SolverConfig& cfg);

// Quadratic form <(grad pj + e_j) . a (grad pi + e_i)> for given fields.
Mat flux_quadratic_form(const CoefficientField& a, const std::vector<ScalarField>& phi_by_dir);

} // namespace homog
