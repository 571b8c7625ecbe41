#include "homog/serialize.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "homog/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "field binaries are little-endian; big-endian hosts unsupported");

namespace homog {
namespace {

constexpr char kMagic[4] = {'H', 'L', 'F', '1'};

void write_u32(std::ofstream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t read_u32(std::ifstream& is) {
    std::uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}

} // namespace

void save_field(const std::string& path, const TorusGrid& g, const double* data, int n_comp) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("save_field: cannot open " + path);
    os.write(kMagic, 4);
    write_u32(os, static_cast<std::uint32_t>(g.dim));
    write_u32(os, static_cast<std::uint32_t>(g.side));
    write_u32(os, static_cast<std::uint32_t>(n_comp));
    write_u32(os, 0u); // reserved
    const std::size_t count = g.sites() * static_cast<std::size_t>(n_comp);
    os.write(reinterpret_cast<const char*>(data),
             static_cast<std::streamsize>(count * sizeof(double)));
    if (!os) throw IoError("save_field: write failed for " + path);
}

void save_field(const std::string& path, const ScalarField& f) {
    save_field(path, f.grid, f.v.data(), 1);
}
void save_field(const std::string& path, const VectorField& f) {
    save_field(path, f.grid, f.v.data(), f.grid.dim);
}
void save_field(const std::string& path, const SkewField& f) {
    save_field(path, f.grid, f.v.data(), SkewField::n_pairs(f.grid.dim));
}

LoadedField load_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("load_field: cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::string(magic, 4) != std::string(kMagic, 4))
        throw IoError("load_field: bad magic in " + path);
    const std::uint32_t d = read_u32(is);
    const std::uint32_t L = read_u32(is);
    const std::uint32_t nc = read_u32(is);
    read_u32(is); // reserved
    LoadedField out;
    out.grid = TorusGrid(static_cast<int>(d), static_cast<int>(L));
    out.n_comp = static_cast<int>(nc);
    out.data.resize(out.grid.sites() * nc);
    is.read(reinterpret_cast<char*>(out.data.data()),
            static_cast<std::streamsize>(out.data.size() * sizeof(double)));
    if (!is) throw IoError("load_field: truncated file " + path);
    return out;
}

void save_corrector_bundle(const std::string& dir, const ExtendedCorrector& ec,
                           const std::string& ensemble_desc, std::uint64_t ensemble_hash,
                           std::uint64_t master_seed, std::uint64_t sample_index) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    save_field(dir + "/phi_T.hlf", ec.phi_T);
    save_field(dir + "/q_T.hlf", ec.q_T);
    save_field(dir + "/sigma_T.hlf", ec.sigma_T);
    save_field(dir + "/g_T.hlf", ec.g_T);

    nlohmann::json manifest;
    manifest["T"] = ec.T;
    manifest["direction"] = ec.direction;
    manifest["residuals"] = {{"cg_rel_residual", ec.cg_rel_residual},
                             {"helmholtz_max_rel", ec.helmholtz_residual}};
    std::vector<double> col;
    for (int i = 0; i < ec.q_T.grid.dim; ++i) col.push_back(ec.a_hT_column[i]);
    manifest["a_hT_column"] = col;
    manifest["master_seed"] = master_seed;
    manifest["sample_index"] = sample_index;
    manifest["ensemble"] = ensemble_desc;
    manifest["ensemble_hash"] = ensemble_hash;
    manifest["grid"] = {{"dim", ec.q_T.grid.dim}, {"side", ec.q_T.grid.side}};

    std::ofstream os(dir + "/manifest.json", std::ios::trunc);
    if (!os) throw IoError("save_corrector_bundle: cannot write manifest");
    os << manifest.dump(2) << "\n";
}

void save_trajectory(const std::string& dir, const SemigroupTrajectory& traj) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    nlohmann::json manifest;
    manifest["direction"] = traj.direction;
    manifest["steps_per_dyad"] = traj.steps_per_dyad;
    manifest["times"] = traj.times;
    manifest["max_cg_residual"] = traj.max_cg_residual;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        char name[64];
        std::snprintf(name, sizeof name, "u_%04zu.hlf", i);
        save_field(dir + "/" + name, traj.u[i]);
        std::snprintf(name, sizeof name, "phi_%04zu.hlf", i);
        save_field(dir + "/" + name, traj.phi[i]);
    }
    std::ofstream os(dir + "/manifest.json", std::ios::trunc);
    if (!os) throw IoError("save_trajectory: cannot write manifest");
    os << manifest.dump(2) << "\n";
}

} // namespace homog
