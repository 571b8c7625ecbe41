#include "homog/minimal_radius.hpp"

#include <vector>

#include "homog/errors.hpp"

namespace homog {
namespace {

// Mean-square oscillation over the ball, summed across components.
double oscillation(const std::vector<const double*>& comps, const TorusGrid& g, int R) {
    std::array<int, 3> x{0, 0, 0};
    double count = 0.0;
    std::vector<double> sum(comps.size(), 0.0), sumsq(comps.size(), 0.0);

    const int zlo = g.dim == 3 ? -R : 0;
    const int zhi = g.dim == 3 ? R : 0;
    for (int dz = zlo; dz <= zhi; ++dz)
        for (int dy = -R; dy <= R; ++dy)
            for (int dx = -R; dx <= R; ++dx) {
                x = {dx & g.mask(), dy & g.mask(), dz & g.mask()};
                const std::size_t i = g.index(x);
                for (std::size_t c = 0; c < comps.size(); ++c) {
                    const double v = comps[c][i];
                    sum[c] += v;
                    sumsq[c] += v * v;
                }
                count += 1.0;
            }

    double msq = 0.0;
    for (std::size_t c = 0; c < comps.size(); ++c) {
        const double mean = sum[c] / count;
        msq += sumsq[c] / count - mean * mean;
    }
    return msq;
}

} // namespace

int minimal_radius(const ScalarField& phi, const SkewField& sigma, double delta) {
    if (!(delta > 0.0)) throw ParameterError("minimal_radius: delta must be positive");
    if (!phi.grid.same_as(sigma.grid)) throw ParameterError("minimal_radius: grid mismatch");
    const TorusGrid& g = phi.grid;
    const int r_cap = g.side / 4;

    std::vector<const double*> comps;
    comps.push_back(phi.v.data());
    for (int p = 0; p < SkewField::n_pairs(g.dim); ++p) comps.push_back(sigma.pair(p));

    // Scan dyadic R from the cap down; the first failure pins r* just above it
    // (or at the sentinel when R = L/4 itself fails).
    int r_star = 1;
    for (int R = r_cap; R >= 1; R /= 2) {
        const bool pass = oscillation(comps, g, R) / (static_cast<double>(R) * R) <= delta;
        if (!pass) {
            r_star = R < r_cap ? 2 * R : r_cap;
            break;
        }
    }
    return r_star;
}

} // namespace homog
