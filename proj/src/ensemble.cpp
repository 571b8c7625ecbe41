#include "homog/ensemble.hpp"

#include <cmath>
#include <sstream>

#include "homog/errors.hpp"
#include "homog/rng.hpp"

namespace homog {
namespace {

constexpr std::uint32_t kEdgeTag = 0xed6eu;
constexpr std::uint32_t kBlockTag = 0xb10cu;

} // namespace

void EnsembleSpec::validate(const TorusGrid& g) const {
    if (!(lambda > 0.0 && lambda < 1.0))
        throw ParameterError("EnsembleSpec: lambda must lie in (0,1)");
    if (kind == EnsembleKind::bernoulli && !(p >= 0.0 && p <= 1.0))
        throw ParameterError("EnsembleSpec: p must lie in [0,1]");
    if (kind == EnsembleKind::block) {
        if (block_size < 1 || g.side % block_size != 0)
            throw ParameterError("EnsembleSpec: block size must divide L");
    }
}

std::string EnsembleSpec::to_string() const {
    std::ostringstream os;
    switch (kind) {
    case EnsembleKind::bernoulli:
        os << "bernoulli(lambda=" << lambda << ",p=" << p << ")";
        break;
    case EnsembleKind::uniform:
        os << "uniform(lambda=" << lambda << ")";
        break;
    case EnsembleKind::block:
        os << "block(lambda=" << lambda << ",m=" << block_size << ")";
        break;
    }
    return os.str();
}

std::uint64_t EnsembleSpec::hash() const {
    const std::string s = to_string();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

EnsembleSpec parse_ensemble(const std::string& kind, double lambda, double p, int block_size) {
    EnsembleSpec spec;
    if (kind == "bernoulli")
        spec.kind = EnsembleKind::bernoulli;
    else if (kind == "uniform")
        spec.kind = EnsembleKind::uniform;
    else if (kind == "block")
        spec.kind = EnsembleKind::block;
    else
        throw ParameterError("unknown ensemble kind: " + kind);
    spec.lambda = lambda;
    spec.p = p;
    spec.block_size = block_size;
    return spec;
}

CoefficientField sample(const EnsembleSpec& spec, const TorusGrid& grid,
                        std::uint64_t master_seed, std::uint64_t index) {
    spec.validate(grid);
    CoefficientField a(grid, spec.lambda);
    const std::size_t n = grid.sites();

    if (spec.kind == EnsembleKind::block) {
        const int m = spec.block_size;
        const int blocks_per_side = grid.side / m;
        for (int ax = 0; ax < grid.dim; ++ax) {
            double* ac = a.comp(ax);
#pragma omp parallel for schedule(static)
            for (std::ptrdiff_t is = 0; is < static_cast<std::ptrdiff_t>(n); ++is) {
                const std::size_t i = static_cast<std::size_t>(is);
                const auto x = grid.coords(i);
                std::uint64_t bid = 0;
                for (int c = grid.dim - 1; c >= 0; --c)
                    bid = bid * static_cast<std::uint64_t>(blocks_per_side) +
                          static_cast<std::uint64_t>(x[c] / m);
                const double u = counter_uniform(master_seed, index, bid, kBlockTag);
                ac[i] = spec.lambda + (1.0 - spec.lambda) * u;
            }
        }
        return a;
    }

    for (int ax = 0; ax < grid.dim; ++ax) {
        double* ac = a.comp(ax);
        const std::uint64_t base = static_cast<std::uint64_t>(ax) * n;
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t is = 0; is < static_cast<std::ptrdiff_t>(n); ++is) {
            const std::size_t i = static_cast<std::size_t>(is);
            const double u = counter_uniform(master_seed, index, base + i, kEdgeTag);
            if (spec.kind == EnsembleKind::bernoulli)
                ac[i] = u < spec.p ? spec.lambda : 1.0;
            else
                ac[i] = spec.lambda + (1.0 - spec.lambda) * u;
        }
    }
    return a;
}

RangeCheckResult empirical_range_check(const EnsembleSpec& spec, const TorusGrid& grid,
                                       std::uint64_t master_seed, int separation,
                                       int n_samples) {
    if (n_samples < 100)
        throw ParameterError("empirical_range_check: need at least 100 samples");
    spec.validate(grid);

    // Probe pairs: the axis-0 edge at a few base sites against the same-axis
    // edge shifted by `separation` along each coordinate direction.
    struct Pair {
        std::size_t i, j;
    };
    std::vector<Pair> pairs;
    std::array<int, 3> base = {1, 1, 1};
    const std::size_t i0 = grid.index(base);
    for (int ax = 0; ax < grid.dim; ++ax) {
        std::size_t j = i0;
        for (int s = 0; s < separation; ++s) j = grid.shift_up(j, ax);
        pairs.push_back({i0, j});
    }

    std::vector<double> sx(pairs.size(), 0.0), sy(pairs.size(), 0.0), sxx(pairs.size(), 0.0),
        syy(pairs.size(), 0.0), sxy(pairs.size(), 0.0);
    for (int s = 0; s < n_samples; ++s) {
        const CoefficientField a = sample(spec, grid, master_seed, static_cast<std::uint64_t>(s));
        const double* a0 = a.comp(0);
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            const double x = a0[pairs[p].i];
            const double y = a0[pairs[p].j];
            sx[p] += x;
            sy[p] += y;
            sxx[p] += x * x;
            syy[p] += y * y;
            sxy[p] += x * y;
        }
    }

    RangeCheckResult res;
    res.separation = separation;
    res.stderr_mc = 1.0 / std::sqrt(static_cast<double>(n_samples));
    const double n = static_cast<double>(n_samples);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const double cov = sxy[p] / n - (sx[p] / n) * (sy[p] / n);
        const double vx = sxx[p] / n - (sx[p] / n) * (sx[p] / n);
        const double vy = syy[p] / n - (sy[p] / n) * (sy[p] / n);
        if (vx <= 0.0 || vy <= 0.0) continue; // degenerate (p = 0 or 1)
        res.max_abs_correlation =
            std::max(res.max_abs_correlation, std::fabs(cov / std::sqrt(vx * vy)));
    }
    return res;
}

} // namespace homog
