#pragma once

#include <cstddef>
#include <functional>

#include "homog/field.hpp"

namespace homog {

enum class Preconditioner { none, diagonal_mass };

struct SolverConfig {
    double rel_tolerance = 1e-9; // on ||b - A x|| / ||b||
    int max_iterations = -1;     // -1: 10 * n unknowns
    Preconditioner precond = Preconditioner::diagonal_mass;

    void validate() const;
};

struct CgStats {
    int iterations = 0;
    double rel_residual = 0.0;
};

// Preconditioned conjugate gradients for a symmetric positive definite
// operator given as a functor; x holds the initial guess on entry. The
// optional per-iteration observer receives the recurrence residual norm.
CgStats conjugate_gradient(const std::function<void(const double*, double*)>& apply_op,
                           const double* inv_diag, // nullptr: unpreconditioned
                           const double* rhs, double* x, std::size_t n, const SolverConfig& cfg,
                           const std::function<void(int, double)>& observer = {});

// Solves ((1/T) + A) u = rhs with A = -div(a grad .), SPD for elliptic a.
ScalarField solve_massive_elliptic(const CoefficientField& a, double T, const ScalarField& rhs,
                                   const SolverConfig& cfg, CgStats* stats = nullptr,
                                   const ScalarField* initial_guess = nullptr);

} // namespace homog
