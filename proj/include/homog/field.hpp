#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "homog/grid.hpp"

namespace homog {

// Site-valued lattice function (holds phi, u, v, g components, ...).
struct ScalarField {
    TorusGrid grid;
    std::vector<double> v; // one value per site

    ScalarField() = default;
    explicit ScalarField(const TorusGrid& g, double fill = 0.0) : grid(g), v(g.sites(), fill) {}

    double& operator[](std::size_t i) { return v[i]; }
    double operator[](std::size_t i) const { return v[i]; }
    std::size_t size() const { return v.size(); }
};

// Edge-valued lattice function: component i lives on the edge from x to x+e_i
// and is stored attributed to the tail site x. Layout is component-major:
// comp(i)[site].
struct VectorField {
    TorusGrid grid;
    std::vector<double> v; // dim * sites values

    VectorField() = default;
    explicit VectorField(const TorusGrid& g, double fill = 0.0) : grid(g), v(g.edges(), fill) {}

    double* comp(int axis) { return v.data() + static_cast<std::size_t>(axis) * grid.sites(); }
    const double* comp(int axis) const {
        return v.data() + static_cast<std::size_t>(axis) * grid.sites();
    }
    std::size_t size() const { return v.size(); }
};

// Skew-symmetric tensor field sigma_{jk}: only the d(d-1)/2 components with
// j < k are stored; sigma_{kj} = -sigma_{jk} holds by construction and
// sigma_{jj} = 0.
struct SkewField {
    TorusGrid grid;
    std::vector<double> v; // pairs * sites, pair-major

    SkewField() = default;
    explicit SkewField(const TorusGrid& g, double fill = 0.0)
        : grid(g), v(static_cast<std::size_t>(n_pairs(g.dim)) * g.sites(), fill) {}

    static int n_pairs(int dim) { return dim * (dim - 1) / 2; }

    // Lexicographic pair index for j < k: d=2 -> (0,1); d=3 -> (0,1),(0,2),(1,2).
    static int pair_index(int j, int k, int dim) {
        if (j > k) return pair_index(k, j, dim);
        int p = 0;
        for (int a = 0; a < dim; ++a)
            for (int b = a + 1; b < dim; ++b) {
                if (a == j && b == k) return p;
                ++p;
            }
        throw ParameterError("SkewField: bad component pair");
    }

    double* pair(int p) { return v.data() + static_cast<std::size_t>(p) * grid.sites(); }
    const double* pair(int p) const {
        return v.data() + static_cast<std::size_t>(p) * grid.sites();
    }

    // Full-tensor entry sigma_{jk}(site) with the skew sign convention.
    double entry(int j, int k, std::size_t site) const {
        if (j == k) return 0.0;
        const double s = pair(pair_index(j, k, grid.dim))[site];
        return j < k ? s : -s;
    }
};

// One realization of the random medium: per-edge conductances in [lambda, 1],
// stored like a VectorField (component-major, tail-site attribution).
struct CoefficientField {
    TorusGrid grid;
    std::vector<double> cond; // dim * sites conductances
    double lambda = 0.25;

    CoefficientField() = default;
    CoefficientField(const TorusGrid& g, double lam, double fill = 1.0)
        : grid(g), cond(g.edges(), fill), lambda(lam) {}

    double* comp(int axis) { return cond.data() + static_cast<std::size_t>(axis) * grid.sites(); }
    const double* comp(int axis) const {
        return cond.data() + static_cast<std::size_t>(axis) * grid.sites();
    }
};

inline bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

} // namespace homog
