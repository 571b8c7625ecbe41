// Microbenchmark comparing the production kernels (OpenMP parallel, with a
// cache-friendly d=2 fast path) against the plain-loop serial references that
// the unit tests hold them to. The last row times one full corrector solve
// with 1 thread vs all threads.

#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "homog/cg.hpp"
#include "homog/ensemble.hpp"
#include "homog/kernels.hpp"
#include "homog/mollify.hpp"
#include "homog/ops.hpp"

using namespace homog;

namespace {

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

template <class Fn>
double time_best_of(int reps, Fn&& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const double t0 = now_seconds();
        fn();
        best = std::min(best, now_seconds() - t0);
    }
    return best;
}

} // namespace

int main() {
    const TorusGrid grid(2, 256);
    const EnsembleSpec ens; // bernoulli defaults
    const CoefficientField a = sample(ens, grid, 42, 0);
    const std::size_t n = grid.sites();

    ScalarField u(grid);
    for (std::size_t i = 0; i < n; ++i) u.v[i] = std::sin(0.37 * static_cast<double>(i));
    ScalarField out(grid);
    VectorField vec(grid);

#ifdef _OPENMP
    const int threads = omp_get_max_threads();
#else
    const int threads = 1;
#endif
    std::printf("grid %dx%d, %d thread(s)\n", grid.side, grid.side, threads);
    std::printf("%-28s %14s %12s %8s\n", "kernel", "reference [ms]", "kernel [ms]", "ratio");

    auto report = [](const char* name, double ts, double tp) {
        std::printf("%-28s %14.3f %12.3f %8.2f\n", name, ts * 1e3, tp * 1e3, ts / tp);
    };

    report("apply_conductance",
           time_best_of(20, [&] { serial_ref::apply_conductance(a, u.v.data(), out.v.data(),
                                                                0.1, 1.0); }),
           time_best_of(20, [&] { kernels::apply_conductance(a, u.v.data(), out.v.data(),
                                                             0.1, 1.0); }));
    report("block_dot",
           time_best_of(50, [&] { (void)serial_ref::block_dot(u.v.data(), u.v.data(), n); }),
           time_best_of(50, [&] { (void)kernels::block_dot(u.v.data(), u.v.data(), n); }));
    report("gradient",
           time_best_of(20, [&] { serial_ref::gradient(u, vec); }),
           time_best_of(20, [&] { kernels::gradient(u, vec); }));
    report("divergence",
           time_best_of(20, [&] { serial_ref::divergence(vec, out); }),
           time_best_of(20, [&] { kernels::divergence(vec, out); }));

    // end-to-end: one corrector solve with 1 thread vs all threads
    SolverConfig cfg;
    cfg.rel_tolerance = 1e-7;
#ifdef _OPENMP
    omp_set_num_threads(1);
#endif
    const double t_serial = time_best_of(1, [&] {
        (void)solve_massive_elliptic(a, 256.0, divergence_of_a_e(a, 0), cfg);
    });
#ifdef _OPENMP
    omp_set_num_threads(threads);
#endif
    const double t_par = time_best_of(1, [&] {
        (void)solve_massive_elliptic(a, 256.0, divergence_of_a_e(a, 0), cfg);
    });
    report("corrector solve (CG)", t_serial, t_par);
    return 0;
}
