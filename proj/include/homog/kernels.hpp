#pragma once

#include <cstddef>

#include "homog/field.hpp"

// Data-parallel inner kernels. Every kernel here has a serial reference twin
// in homog::serial_ref (kernels_serial.cpp) with identical arithmetic; tests
// assert bitwise agreement and tools/bench compares their throughput.
//
// Reductions use a fixed block decomposition (block size independent of the
// thread count) summed in index order, so results are bitwise reproducible
// for any number of OpenMP threads.

namespace homog {
namespace kernels {

inline constexpr std::size_t kReductionBlock = 4096;

// out = mass*u + scale * (-div(a grad u)), the conductance operator stencil:
//   (A u)(x) = sum_i [ a_i(x) (u(x) - u(x+e_i)) + a_i(x-e_i) (u(x) - u(x-e_i)) ].
void apply_conductance(const CoefficientField& a, const double* u, double* out, double mass,
                       double scale);

// Jacobi diagonal of mass + scale*A.
void conductance_diagonal(const CoefficientField& a, double* out, double mass, double scale);

double block_dot(const double* x, const double* y, std::size_t n);
double block_sum(const double* x, std::size_t n);

void axpy(double alpha, const double* x, double* y, std::size_t n); // y += alpha x
void xpay(const double* x, double beta, double* y, std::size_t n);  // y  = x + beta y
void scale(double alpha, double* y, std::size_t n);
void copy(const double* x, double* y, std::size_t n);

// (grad u)_i(x) = u(x+e_i) - u(x), forward difference with periodic wrap.
void gradient(const ScalarField& u, VectorField& out);
// (div F)(x) = sum_i [F_i(x) - F_i(x-e_i)], the negative adjoint of gradient.
void divergence(const VectorField& f, ScalarField& out);

} // namespace kernels

// Plain-loop reference implementations kept for testing the parallel kernels.
namespace serial_ref {

void apply_conductance(const CoefficientField& a, const double* u, double* out, double mass,
                       double scale);
double block_dot(const double* x, const double* y, std::size_t n);
void gradient(const ScalarField& u, VectorField& out);
void divergence(const VectorField& f, ScalarField& out);

} // namespace serial_ref
} // namespace homog
