#pragma once

// Shared helpers for the test suites: seeded pseudo-random fields (via the
// library's counter hash so tests stay deterministic) and a second,
// independently written Philox reference used as a known-answer oracle.

#include <array>
#include <cstdint>
#include <vector>

#include "homog/field.hpp"
#include "homog/rng.hpp"

namespace testutil {

inline double uniform01(std::uint64_t seed, std::uint64_t i) {
    return homog::counter_uniform(seed, i, 0, 0x7e57u);
}

inline homog::ScalarField random_scalar(const homog::TorusGrid& g, std::uint64_t seed,
                                        double lo = -1.0, double hi = 1.0) {
    homog::ScalarField f(g);
    for (std::size_t i = 0; i < f.v.size(); ++i)
        f.v[i] = lo + (hi - lo) * uniform01(seed, i);
    return f;
}

inline homog::VectorField random_vector(const homog::TorusGrid& g, std::uint64_t seed,
                                        double lo = -1.0, double hi = 1.0) {
    homog::VectorField f(g);
    for (std::size_t i = 0; i < f.v.size(); ++i)
        f.v[i] = lo + (hi - lo) * uniform01(seed, i);
    return f;
}

// Gaussian draw via Box-Muller on counter uniforms.
inline double gaussian(std::uint64_t seed, std::uint64_t i) {
    const double u1 = homog::counter_uniform(seed, i, 1, 0x6a5u);
    const double u2 = homog::counter_uniform(seed, i, 2, 0x6a5u);
    const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
    return r * std::cos(6.283185307179586 * u2);
}

// max |a_i - b_i| over two equally sized value sets.
inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

inline double max_abs_of(const std::vector<double>& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::fabs(v));
    return m;
}

// Independent re-implementation of Philox4x32-10, written directly from the
// round description (bumped key added after each of rounds 1..9), used to
// cross-check the library's generator.
inline std::array<std::uint32_t, 4> reference_philox(std::array<std::uint32_t, 4> counter,
                                                     std::array<std::uint32_t, 2> key) {
    auto mulhilo = [](std::uint32_t a, std::uint32_t b, std::uint32_t& hi) {
        const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
        hi = static_cast<std::uint32_t>(p >> 32);
        return static_cast<std::uint32_t>(p & 0xffffffffu);
    };
    for (int round = 0;; ++round) {
        std::uint32_t hi0, hi1;
        const std::uint32_t lo0 = mulhilo(0xD2511F53u, counter[0], hi0);
        const std::uint32_t lo1 = mulhilo(0xCD9E8D57u, counter[2], hi1);
        counter = {hi1 ^ counter[1] ^ key[0], lo1, hi0 ^ counter[3] ^ key[1], lo0};
        if (round == 9) break;
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
    }
    return counter;
}

} // namespace testutil
