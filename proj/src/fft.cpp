#include "homog/fft.hpp"

#include <cmath>

#include "homog/errors.hpp"
#include "homog/kernels.hpp"
#include "homog/ops.hpp"

namespace homog {
namespace {

constexpr double kPi = 3.14159265358979323846;

// Iterative radix-2 Cooley-Tukey on a strided line of length L.
void fft_line(cplx* data, int L, std::size_t stride, const std::vector<cplx>& twiddle,
              bool inverse) {
    // bit-reversal permutation
    for (int i = 1, j = 0; i < L; ++i) {
        int bit = L >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[static_cast<std::size_t>(i) * stride],
                             data[static_cast<std::size_t>(j) * stride]);
    }
    for (int len = 2; len <= L; len <<= 1) {
        const int half = len >> 1;
        const int tstep = L / len;
        for (int i = 0; i < L; i += len) {
            for (int k = 0; k < half; ++k) {
                cplx w = twiddle[static_cast<std::size_t>(k * tstep)];
                if (inverse) w = std::conj(w);
                cplx* lo = data + static_cast<std::size_t>(i + k) * stride;
                cplx* hi = data + static_cast<std::size_t>(i + k + half) * stride;
                const cplx t = *hi * w;
                *hi = *lo - t;
                *lo += t;
            }
        }
    }
}

void fft_axis(const TorusGrid& g, std::vector<cplx>& data, int axis, bool inverse) {
    const int L = g.side;
    std::vector<cplx> twiddle(static_cast<std::size_t>(L / 2));
    for (int k = 0; k < L / 2; ++k)
        twiddle[static_cast<std::size_t>(k)] = std::polar(1.0, -2.0 * kPi * k / L);

    const std::size_t n = g.sites();
    const std::size_t nlines = n / static_cast<std::size_t>(L);
    const int l = g.log2_side();
    const std::size_t stride = std::size_t(1) << (axis * l);

    // Enumerate line origins: all sites with coordinate 'axis' equal to zero.
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t line = 0; line < static_cast<std::ptrdiff_t>(nlines); ++line) {
        const std::size_t lowmask = stride - 1;
        const std::size_t lo = static_cast<std::size_t>(line) & lowmask;
        const std::size_t hi = (static_cast<std::size_t>(line) & ~lowmask) << l;
        fft_line(data.data() + (hi | lo), L, stride, twiddle, inverse);
    }
}

} // namespace

void fft_forward(const TorusGrid& g, std::vector<cplx>& data) {
    for (int ax = 0; ax < g.dim; ++ax) fft_axis(g, data, ax, false);
}

void fft_inverse(const TorusGrid& g, std::vector<cplx>& data) {
    for (int ax = 0; ax < g.dim; ++ax) fft_axis(g, data, ax, true);
    const double inv = 1.0 / static_cast<double>(g.sites());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(data.size()); ++i)
        data[static_cast<std::size_t>(i)] *= inv;
}

std::vector<cplx> to_spectral(const ScalarField& f) {
    std::vector<cplx> data(f.v.size());
    for (std::size_t i = 0; i < f.v.size(); ++i) data[i] = f.v[i];
    fft_forward(f.grid, data);
    return data;
}

ScalarField from_spectral(const TorusGrid& g, std::vector<cplx> data) {
    fft_inverse(g, data);
    ScalarField out(g);
    for (std::size_t i = 0; i < data.size(); ++i) out.v[i] = data[i].real();
    return out;
}

double laplace_symbol(const TorusGrid& g, std::size_t mode) {
    const auto k = g.coords(mode);
    double l = 0.0;
    for (int i = 0; i < g.dim; ++i) {
        const double s = std::sin(kPi * k[i] / g.side);
        l += 4.0 * s * s;
    }
    return l;
}

cplx forward_diff_symbol(const TorusGrid& g, std::size_t mode, int axis) {
    const auto k = g.coords(mode);
    const double theta = 2.0 * kPi * k[axis] / g.side;
    return cplx(std::cos(theta) - 1.0, std::sin(theta));
}

ScalarField fft_poisson_solve(double mass, const ScalarField& rhs) {
    if (mass < 0.0) throw ParameterError("fft_poisson_solve: mass must be >= 0");
    if (mass == 0.0) {
        const double mean = spatial_mean(rhs);
        const double scale = std::max(max_abs(rhs), 1.0);
        if (std::fabs(mean) > 1e-10 * scale)
            throw ParameterError("fft_poisson_solve: mass = 0 requires a mean-zero rhs");
    }
    std::vector<cplx> data = to_spectral(rhs);
    const TorusGrid& g = rhs.grid;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t is = 0; is < static_cast<std::ptrdiff_t>(data.size()); ++is) {
        const std::size_t i = static_cast<std::size_t>(is);
        const double denom = mass + laplace_symbol(g, i);
        data[i] = denom > 0.0 ? data[i] / denom : cplx(0.0, 0.0);
    }
    return from_spectral(g, std::move(data));
}

VectorField fft_poisson_solve(double mass, const VectorField& rhs) {
    VectorField out(rhs.grid);
    const std::size_t n = rhs.grid.sites();
    for (int ax = 0; ax < rhs.grid.dim; ++ax) {
        ScalarField comp(rhs.grid);
        kernels::copy(rhs.comp(ax), comp.v.data(), n);
        ScalarField sol = fft_poisson_solve(mass, comp);
        kernels::copy(sol.v.data(), out.comp(ax), n);
    }
    return out;
}

} // namespace homog
