#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "homog/cg.hpp"
#include "homog/config.hpp"
#include "homog/ensemble.hpp"
#include "homog/grid.hpp"

// Named Monte Carlo experiments mapping the theory to acceptance numbers.
// Sample-level parallelism with per-sample seeds derived from (master_seed,
// index) and index-ordered reduction: a report is a pure function of
// (spec, master_seed), bit-identical for any worker count, and resumable from
// the per-sample checkpoint file.

namespace homog {

enum class ExperimentName {
    E1_clt_decay,
    E2_systematic_error,
    E3_semigroup_decay,
    E4_corrector_growth,
    E5_commutator_gaussianity,
    E6_two_scale,
    E7_propagator_error,
    E8_minimal_radius,
};

std::string to_string(ExperimentName name);
ExperimentName experiment_from_string(const std::string& s);

struct ExperimentSpec {
    ExperimentName name = ExperimentName::E3_semigroup_decay;
    EnsembleSpec ensemble;
    int dim = 2;
    int side = 256;
    int n_samples = 100;
    std::uint64_t master_seed = 1;

    SolverConfig solver;           // elliptic (corrector) solves
    SolverConfig parabolic_solver; // Crank-Nicolson inner solves
    int steps_per_dyad = 16;

    std::vector<double> T_ladder; // E2/E3/E4 cutoffs, dyadic
    std::vector<double> scales;   // E1/E5 averaging scales
    double T_main = 0.0;          // E1 cutoff, E7 horizon; 0 = derive from side
    double t_commutator = 0.0;    // E5; 0 = derive from side
    std::vector<int> eps_sides;   // E6 grid rungs
    double delta_rstar = 0.01;    // E8

    // Testing hook: stop after this many freshly computed samples (-1: off).
    int stop_after = -1;

    ExperimentSpec() { parabolic_solver.rel_tolerance = 1e-11; }

    // Fill the experiment's derived parameters (ladders, scales, cutoffs)
    // from (name, dim, side) where they were left unset.
    void apply_defaults();
    void validate() const;
    nlohmann::json to_json() const;
    std::uint64_t hash() const;

    static ExperimentSpec from_config(const Config& cfg);
};

struct WorkPlan {
    std::vector<std::uint64_t> seeds;         // seeds[i] = derive(master_seed, i)
    std::vector<std::vector<int>> per_worker; // round-robin partition
};

WorkPlan schedule(int n_samples, int workers, std::uint64_t master_seed);

struct ExperimentReport {
    nlohmann::json doc;
    bool pass = false;
    int n_failed_samples = 0;
};

// Runs the experiment, writing report.json, rungs.csv, seeds.csv, and
// checkpoint.jsonl into run_dir (created if needed, resumed if a checkpoint
// is present).
ExperimentReport run_experiment(const ExperimentSpec& spec, int workers,
                                const std::string& run_dir);

// Pure reduction step (exposed so synthetic inputs can drive it in tests).
nlohmann::json reduce_experiment(const ExperimentSpec& spec,
                                 const std::vector<nlohmann::json>& per_sample);

// Canonical run directory: <output>/<name>-<16 hex digits of the spec hash>.
std::string run_directory(const std::string& output_root, const ExperimentSpec& spec);

} // namespace homog
