#pragma once

#include <vector>

#include "homog/fft.hpp"

// Gaussian spatial averages f_R: circular convolution with the periodized
// Gaussian (2 pi R^2)^{-d/2} exp(-|x|^2 / (2 R^2)), sampled on the lattice and
// normalized to unit discrete mass. The convolution itself is computed
// spectrally and is exact for that kernel; the scale restriction R <= L/8
// keeps the wrap-around images negligible. The heat-kernel semigroup relation
// (f_R)_r = f_sqrt(R^2+r^2) holds up to lattice aliasing, which is below 1e-10
// once min(R, r) >= 1.5.

namespace homog {

// Precomputed spectral kernels for one grid and a ladder of scales; reused
// across Monte Carlo samples.
class MollifierPlan {
public:
    MollifierPlan(const TorusGrid& g, std::vector<double> scales);

    const std::vector<double>& scales() const { return scales_; }

    // Full mollified field at scale index s.
    ScalarField apply(const ScalarField& f, std::size_t s) const;

    // Value of the mollified field at the origin for every scale, sharing one
    // forward FFT of f (the only thing the CLT profiles need).
    std::vector<double> origin_values(const ScalarField& f) const;

private:
    TorusGrid grid_;
    std::vector<double> scales_;
    std::vector<std::vector<cplx>> kernel_hat_;
};

// One-off convenience wrappers.
ScalarField gaussian_mollify(const ScalarField& f, double R);
VectorField gaussian_mollify(const VectorField& f, double R);

// The real-space kernel (periodized, unit-normalized); exposed for oracles.
ScalarField wrapped_gaussian_kernel(const TorusGrid& g, double R);

} // namespace homog
