#pragma once

#include <complex>
#include <vector>

#include "homog/field.hpp"

// Spectral machinery on the power-of-two torus: an in-house radix-2 FFT (no
// external dependency), the discrete-Laplacian symbol, and exact
// constant-coefficient solves. All spectral solves are exact up to FFT
// round-off, which is orders below every identity tolerance in the tests.

namespace homog {

using cplx = std::complex<double>;

// In-place d-dimensional FFT over the grid, unscaled forward; the inverse
// applies the 1/L^d normalization.
void fft_forward(const TorusGrid& g, std::vector<cplx>& data);
void fft_inverse(const TorusGrid& g, std::vector<cplx>& data);

std::vector<cplx> to_spectral(const ScalarField& f);
ScalarField from_spectral(const TorusGrid& g, std::vector<cplx> data);

// Symbol of the (negative) discrete Laplacian: l(k) = sum_i 4 sin^2(pi k_i / L),
// so that  -Delta u  has multiplier +l(k).
double laplace_symbol(const TorusGrid& g, std::size_t mode);
// Forward-difference symbol m_i(k) = exp(i 2 pi k_i / L) - 1 per axis.
cplx forward_diff_symbol(const TorusGrid& g, std::size_t mode, int axis);

// Solves (mass - Delta) u = rhs. For mass = 0 the rhs must have zero spatial
// mean (parameter error otherwise) and the mean-zero solution is returned.
ScalarField fft_poisson_solve(double mass, const ScalarField& rhs);

// Componentwise (mass - Delta) g = rhs on vector fields.
VectorField fft_poisson_solve(double mass, const VectorField& rhs);

} // namespace homog
