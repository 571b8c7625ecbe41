#include "homog/mollify.hpp"

#include <cmath>

#include "homog/errors.hpp"
#include "homog/kernels.hpp"

namespace homog {
namespace {

constexpr double kPi = 3.14159265358979323846;

void check_scale(const TorusGrid& g, double R) {
    if (!(R > 0.0) || R > g.side / 8.0)
        throw ParameterError("gaussian_mollify: scale must satisfy 0 < R <= L/8");
}

} // namespace

ScalarField wrapped_gaussian_kernel(const TorusGrid& g, double R) {
    check_scale(g, R);
    ScalarField ker(g);
    const int L = g.side;
    const double inv2R2 = 1.0 / (2.0 * R * R);
    const std::size_t n = g.sites();
    // Sum over periodic images; with R <= L/8 images beyond +-1 are < 1e-70.
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = g.coords(i);
        double val = 0.0;
        if (g.dim == 2) {
            for (int mx = -1; mx <= 1; ++mx)
                for (int my = -1; my <= 1; ++my) {
                    const double dx = x[0] + mx * L;
                    const double dy = x[1] + my * L;
                    val += std::exp(-(dx * dx + dy * dy) * inv2R2);
                }
        } else {
            for (int mx = -1; mx <= 1; ++mx)
                for (int my = -1; my <= 1; ++my)
                    for (int mz = -1; mz <= 1; ++mz) {
                        const double dx = x[0] + mx * L;
                        const double dy = x[1] + my * L;
                        const double dz = x[2] + mz * L;
                        val += std::exp(-(dx * dx + dy * dy + dz * dz) * inv2R2);
                    }
        }
        ker.v[i] = val;
    }
    const double total = kernels::block_sum(ker.v.data(), n);
    kernels::scale(1.0 / total, ker.v.data(), n);
    return ker;
}

MollifierPlan::MollifierPlan(const TorusGrid& g, std::vector<double> scales)
    : grid_(g), scales_(std::move(scales)) {
    kernel_hat_.reserve(scales_.size());
    for (double R : scales_) {
        ScalarField ker = wrapped_gaussian_kernel(g, R);
        kernel_hat_.push_back(to_spectral(ker));
    }
}

ScalarField MollifierPlan::apply(const ScalarField& f, std::size_t s) const {
    if (!f.grid.same_as(grid_)) throw ParameterError("MollifierPlan: grid mismatch");
    std::vector<cplx> data = to_spectral(f);
    const std::vector<cplx>& kh = kernel_hat_[s];
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(data.size()); ++i)
        data[static_cast<std::size_t>(i)] *= kh[static_cast<std::size_t>(i)];
    return from_spectral(grid_, std::move(data));
}

std::vector<double> MollifierPlan::origin_values(const ScalarField& f) const {
    if (!f.grid.same_as(grid_)) throw ParameterError("MollifierPlan: grid mismatch");
    std::vector<cplx> data = to_spectral(f);
    // (f * ker)(0) = (1/L^d) sum_k f_hat(k) ker_hat(k)
    std::vector<double> out(scales_.size(), 0.0);
    const double inv_n = 1.0 / static_cast<double>(grid_.sites());
    for (std::size_t s = 0; s < scales_.size(); ++s) {
        const std::vector<cplx>& kh = kernel_hat_[s];
        double acc_re = 0.0;
        for (std::size_t i = 0; i < data.size(); ++i)
            acc_re += (data[i] * kh[i]).real();
        out[s] = acc_re * inv_n;
    }
    return out;
}

ScalarField gaussian_mollify(const ScalarField& f, double R) {
    MollifierPlan plan(f.grid, {R});
    return plan.apply(f, 0);
}

VectorField gaussian_mollify(const VectorField& f, double R) {
    check_scale(f.grid, R);
    MollifierPlan plan(f.grid, {R});
    VectorField out(f.grid);
    const std::size_t n = f.grid.sites();
    for (int ax = 0; ax < f.grid.dim; ++ax) {
        ScalarField comp(f.grid);
        kernels::copy(f.comp(ax), comp.v.data(), n);
        ScalarField m = plan.apply(comp, 0);
        kernels::copy(m.v.data(), out.comp(ax), n);
    }
    return out;
}

} // namespace homog
