#pragma once

// Dense-matrix oracles for the small-lattice equivalence tests. Everything
// here is assembled entry by entry from the difference-operator definitions
// and solved by LU with partial pivoting, fully independent of the library's
// kernel and spectral code paths.

#include <cassert>
#include <cmath>
#include <vector>

#include "homog/field.hpp"

namespace oracle {

using homog::CoefficientField;
using homog::TorusGrid;

struct DenseMatrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> a; // row-major

    DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}
    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    std::vector<double> multiply(const std::vector<double>& x) const {
        std::vector<double> y(rows, 0.0);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) y[i] += a[i * cols + j] * x[j];
        return y;
    }

    DenseMatrix transposed() const {
        DenseMatrix t(cols, rows);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
        return t;
    }
};

// Forward-difference matrix D: (d*L^d) x (L^d), rows ordered edge-axis-major
// to match the VectorField layout.
inline DenseMatrix difference_matrix(const TorusGrid& g) {
    const std::size_t n = g.sites();
    DenseMatrix D(g.edges(), n);
    for (int ax = 0; ax < g.dim; ++ax)
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t row = static_cast<std::size_t>(ax) * n + i;
            D(row, g.shift_up(i, ax)) += 1.0;
            D(row, i) -= 1.0;
        }
    return D;
}

// mass*I + (-div a grad): assembled as D^T diag(a) D + mass I.
inline DenseMatrix massive_operator_matrix(const CoefficientField& a, double mass) {
    const TorusGrid& g = a.grid;
    const std::size_t n = g.sites();
    const DenseMatrix D = difference_matrix(g);
    DenseMatrix M(n, n);
    for (std::size_t i = 0; i < n; ++i) M(i, i) = mass;
    for (int ax = 0; ax < g.dim; ++ax)
        for (std::size_t e = 0; e < n; ++e) {
            const std::size_t row = static_cast<std::size_t>(ax) * n + e;
            const double cond = a.comp(ax)[e];
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    M(i, j) += D(row, i) * cond * D(row, j);
        }
    return M;
}

// LU solve with partial pivoting (square systems only).
inline std::vector<double> lu_solve(DenseMatrix m, std::vector<double> b) {
    assert(m.rows == m.cols && m.rows == b.size());
    const std::size_t n = m.rows;
    std::vector<std::size_t> piv(n);
    for (std::size_t i = 0; i < n; ++i) piv[i] = i;

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t best = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::fabs(m(i, k)) > std::fabs(m(best, k))) best = i;
        if (best != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m.a[k * n + j], m.a[best * n + j]);
            std::swap(b[k], b[best]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = m(i, k) / m(k, k);
            m(i, k) = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) m(i, j) -= f * m(k, j);
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= m(ii, j) * x[j];
        x[ii] = s / m(ii, ii);
    }
    return x;
}

// Laplacian matrix (the negative of it: D^T D), for (mass - Lap) solves.
inline DenseMatrix massive_laplacian_matrix(const TorusGrid& g, double mass) {
    CoefficientField ones(g, 0.5, 1.0);
    return massive_operator_matrix(ones, mass);
}

} // namespace oracle
