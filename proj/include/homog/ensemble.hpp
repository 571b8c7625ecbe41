#pragma once

#include <cstdint>
#include <string>

#include "homog/field.hpp"

// Seeded generators of stationary random conductance fields with uniform
// ellipticity lambda <= a_e <= 1 and finite range of dependence: bernoulli
// and uniform have range 1 (independent edges), block has range m (one draw
// per m-cube). Every conductance is a counter-based hash of
// (master_seed, sample index, edge id), independent of generation order.

namespace homog {

enum class EnsembleKind { bernoulli, uniform, block };

struct EnsembleSpec {
    EnsembleKind kind = EnsembleKind::bernoulli;
    double lambda = 0.25;
    double p = 0.5;    // bernoulli only: P(a_e = lambda)
    int block_size = 4; // block only: cube side m, must divide L

    void validate(const TorusGrid& g) const;
    int dependence_range() const { return kind == EnsembleKind::block ? block_size : 1; }
    std::string to_string() const;      // canonical text form (config echo, hashing)
    std::uint64_t hash() const;         // FNV-1a of the canonical form
};

EnsembleSpec parse_ensemble(const std::string& kind, double lambda, double p, int block_size);

CoefficientField sample(const EnsembleSpec& spec, const TorusGrid& grid,
                        std::uint64_t master_seed, std::uint64_t index);

struct RangeCheckResult {
    double max_abs_correlation = 0.0;
    double stderr_mc = 0.0; // ~ 1/sqrt(n) per probed pair
    int separation = 0;
};

// Empirical correlation of edge conductances at the given separation
// (lattice units along each axis), across n_samples realizations.
RangeCheckResult empirical_range_check(const EnsembleSpec& spec, const TorusGrid& grid,
                                       std::uint64_t master_seed, int separation,
                                       int n_samples);

} // namespace homog
