#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "homog/errors.hpp"

namespace homog {

// Periodic lattice of dimension d (2 or 3) with L sites per side, L a power of
// two. Lattice spacing is 1, which is also the unit range of dependence; all
// scales (R, sqrt(T), sqrt(t)) are measured in lattice units.
//
// Site indices are flattened with coordinate 0 fastest:
//   idx = x0 + L*(x1 + L*x2)
// Edges are indexed per axis: edge (x, x+e_axis) carries index axis*L^d + idx,
// i.e. an edge value is attributed to its tail site x.
struct TorusGrid {
    int dim = 2;
    int side = 8;

    TorusGrid() = default;
    TorusGrid(int d, int L) : dim(d), side(L) {
        if (d != 2 && d != 3)
            throw ParameterError("TorusGrid: dimension must be 2 or 3");
        if (L < 4 || (L & (L - 1)) != 0)
            throw ParameterError("TorusGrid: side must be a power of two >= 4");
    }

    std::size_t sites() const {
        std::size_t n = 1;
        for (int i = 0; i < dim; ++i) n *= static_cast<std::size_t>(side);
        return n;
    }
    std::size_t edges() const { return sites() * static_cast<std::size_t>(dim); }

    int mask() const { return side - 1; }
    int log2_side() const {
        int l = 0;
        while ((1 << l) < side) ++l;
        return l;
    }

    std::size_t index(const std::array<int, 3>& x) const {
        std::size_t idx = 0;
        for (int i = dim - 1; i >= 0; --i)
            idx = idx * static_cast<std::size_t>(side) + static_cast<std::size_t>(x[i] & mask());
        return idx;
    }
    std::array<int, 3> coords(std::size_t idx) const {
        std::array<int, 3> x{0, 0, 0};
        for (int i = 0; i < dim; ++i) {
            x[i] = static_cast<int>(idx) & mask();
            idx >>= log2_side();
        }
        return x;
    }

    // Site shifted by +1 along axis, periodic wrap.
    std::size_t shift_up(std::size_t idx, int axis) const {
        const int l = log2_side();
        const std::size_t m = static_cast<std::size_t>(mask()) << (axis * l);
        const std::size_t step = std::size_t(1) << (axis * l);
        return (idx & ~m) | ((idx + step) & m);
    }
    std::size_t shift_down(std::size_t idx, int axis) const {
        const int l = log2_side();
        const std::size_t m = static_cast<std::size_t>(mask()) << (axis * l);
        const std::size_t step = std::size_t(1) << (axis * l);
        return (idx & ~m) | ((idx - step) & m);
    }

    bool same_as(const TorusGrid& o) const { return dim == o.dim && side == o.side; }
};

} // namespace homog
