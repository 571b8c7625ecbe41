#pragma once

#include <array>
#include <cstdint>

// Counter-based random numbers (Philox4x32-10, Salmon et al., SC'11). Each
// draw is a pure function of (key, counter), so fields can be generated in
// any order, from any thread, with bit-identical results.

namespace homog {

struct Philox4x32 {
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWey0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWey1 = 0xBB67AE85u;

    static std::array<std::uint32_t, 4> run(std::array<std::uint32_t, 4> ctr,
                                            std::array<std::uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += kWey0;
            key[1] += kWey1;
        }
        return ctr;
    }
};

// One keyed 64-bit word for (seed; c0, c1, tag). tag keeps independent draw
// streams (edge draws, per-sample seeds, synthetic noise) from colliding.
inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t c0, std::uint64_t c1,
                                  std::uint32_t tag) {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(c0), static_cast<std::uint32_t>(c0 >> 32),
        static_cast<std::uint32_t>(c1), static_cast<std::uint32_t>(c1 >> 32) ^ tag};
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed),
                                              static_cast<std::uint32_t>(seed >> 32)};
    const auto out = Philox4x32::run(ctr, key);
    return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

// Uniform double in [0, 1) with 53 random bits.
inline double counter_uniform(std::uint64_t seed, std::uint64_t c0, std::uint64_t c1,
                              std::uint32_t tag) {
    return static_cast<double>(counter_hash(seed, c0, c1, tag) >> 11) * 0x1.0p-53;
}

// Per-sample seed derivation for the Monte Carlo scheduler.
inline std::uint64_t derive_sample_seed(std::uint64_t master_seed, std::uint64_t index) {
    return counter_hash(master_seed, index, 0, 0x5eedu);
}

} // namespace homog
