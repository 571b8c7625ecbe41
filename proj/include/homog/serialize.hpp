#pragma once

#include <string>

#include "homog/corrector.hpp"
#include "homog/field.hpp"
#include "homog/semigroup.hpp"

// Flat binary field format "HLF1": header (magic, d, L, component count as
// little-endian uint32) followed by the raw doubles, component-major with
// coordinate 0 fastest. Used by the CLI dump-field command and the corrector
// bundles.

namespace homog {

void save_field(const std::string& path, const TorusGrid& g, const double* data, int n_comp);
void save_field(const std::string& path, const ScalarField& f);
void save_field(const std::string& path, const VectorField& f);
void save_field(const std::string& path, const SkewField& f);

struct LoadedField {
    TorusGrid grid;
    int n_comp = 1;
    std::vector<double> data;
};
LoadedField load_field(const std::string& path);

// ExtendedCorrector bundle: one directory of field binaries plus manifest.json
// (T, direction, residuals, a_hT column, seed info, ensemble spec hash).
void save_corrector_bundle(const std::string& dir, const ExtendedCorrector& ec,
                           const std::string& ensemble_desc, std::uint64_t ensemble_hash,
                           std::uint64_t master_seed, std::uint64_t sample_index);

// Trajectory checkpoints: u/phi at the stored dyadic times plus manifest.json.
void save_trajectory(const std::string& dir, const SemigroupTrajectory& traj);

} // namespace homog
