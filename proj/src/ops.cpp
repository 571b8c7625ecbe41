#include "homog/ops.hpp"

#include <cmath>

#include "homog/errors.hpp"

namespace homog {

ScalarField curl_rhs(const VectorField& q, int j, int k) {
    if (j == k) throw ParameterError("curl_rhs: axes must differ");
    const TorusGrid& g = q.grid;
    if (j < 0 || k < 0 || j >= g.dim || k >= g.dim)
        throw ParameterError("curl_rhs: axis out of range");
    ScalarField out(g);
    const double* qj = q.comp(j);
    const double* qk = q.comp(k);
    const std::size_t n = g.sites();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t is = 0; is < static_cast<std::ptrdiff_t>(n); ++is) {
        const std::size_t i = static_cast<std::size_t>(is);
        out.v[i] = (qk[g.shift_up(i, j)] - qk[i]) - (qj[g.shift_up(i, k)] - qj[i]);
    }
    return out;
}

VectorField sigma_divergence(const SkewField& sigma) {
    const TorusGrid& g = sigma.grid;
    VectorField out(g);
    const std::size_t n = g.sites();
    for (int j = 0; j < g.dim; ++j) {
        double* oj = out.comp(j);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t is = 0; is < static_cast<std::ptrdiff_t>(n); ++is) {
            const std::size_t i = static_cast<std::size_t>(is);
            double acc = 0.0;
            for (int k = 0; k < g.dim; ++k) {
                if (k == j) continue;
                acc += sigma.entry(j, k, i) - sigma.entry(j, k, g.shift_down(i, k));
            }
            oj[i] = acc;
        }
    }
    return out;
}

ScalarField apply_massive_operator(const CoefficientField& a, const ScalarField& u, double mass) {
    ScalarField out(u.grid);
    kernels::apply_conductance(a, u.v.data(), out.v.data(), mass, 1.0);
    return out;
}

VectorField flux(const CoefficientField& a, const ScalarField& phi, int direction) {
    const TorusGrid& g = a.grid;
    VectorField q(g);
    kernels::gradient(phi, q);
    const std::size_t n = g.sites();
    for (int ax = 0; ax < g.dim; ++ax) {
        double* qc = q.comp(ax);
        const double* ac = a.comp(ax);
        const double e = ax == direction ? 1.0 : 0.0;
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
            qc[i] = ac[i] * (qc[i] + e);
    }
    return q;
}

ScalarField divergence_of_a_e(const CoefficientField& a, int direction) {
    const TorusGrid& g = a.grid;
    if (direction < 0 || direction >= g.dim)
        throw ParameterError("divergence_of_a_e: direction out of range");
    ScalarField out(g);
    const double* ac = a.comp(direction);
    const std::size_t n = g.sites();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t is = 0; is < static_cast<std::ptrdiff_t>(n); ++is) {
        const std::size_t i = static_cast<std::size_t>(is);
        out.v[i] = ac[i] - ac[g.shift_down(i, direction)];
    }
    return out;
}

double spatial_mean(const ScalarField& f) {
    return kernels::block_sum(f.v.data(), f.v.size()) / static_cast<double>(f.v.size());
}

std::array<double, 3> spatial_mean(const VectorField& f) {
    std::array<double, 3> m{0.0, 0.0, 0.0};
    const std::size_t n = f.grid.sites();
    for (int ax = 0; ax < f.grid.dim; ++ax)
        m[ax] = kernels::block_sum(f.comp(ax), n) / static_cast<double>(n);
    return m;
}

double dot(const ScalarField& x, const ScalarField& y) {
    return kernels::block_dot(x.v.data(), y.v.data(), x.v.size());
}
double dot(const VectorField& x, const VectorField& y) {
    return kernels::block_dot(x.v.data(), y.v.data(), x.v.size());
}
double nrm2(const ScalarField& x) { return std::sqrt(dot(x, x)); }
double nrm2(const VectorField& x) { return std::sqrt(dot(x, x)); }

double max_abs(const ScalarField& x) {
    double m = 0.0;
    for (double t : x.v) m = std::max(m, std::fabs(t));
    return m;
}
double max_abs(const VectorField& x) {
    double m = 0.0;
    for (double t : x.v) m = std::max(m, std::fabs(t));
    return m;
}

} // namespace homog
