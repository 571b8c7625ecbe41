// homog: numerical laboratory for quantitative stochastic homogenization on
// periodic conductance lattices.
//
// Subcommands:
//   run        run a Monte Carlo experiment from a config file
//   corrector  solve one extended-corrector bundle and write it to disk
//   report     render a run directory's report.json as a table (or CSV)
//   dump-field inspect a field binary
//
// Exit codes: 0 success, 1 operational error, 2 statistics out of tolerance.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "homog/corrector.hpp"
#include "homog/ensemble.hpp"
#include "homog/errors.hpp"
#include "homog/experiments.hpp"
#include "homog/serialize.hpp"

namespace {

using nlohmann::json;

int default_workers() {
    if (const char* env = std::getenv("HOMOG_WORKERS")) {
        const int w = std::atoi(env);
        if (w >= 1) return w;
    }
    return 2;
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& overrides,
            std::string output, int workers) {
    homog::Config cfg = homog::Config::from_file(config_path);
    for (const std::string& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw homog::ParameterError("--set expects key=value, got: " + kv);
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (output.empty()) output = cfg.get_string("output", "runs");
    if (workers <= 0)
        workers = static_cast<int>(cfg.get_int("workers", default_workers()));

    const homog::ExperimentSpec spec = homog::ExperimentSpec::from_config(cfg);
    const std::string run_dir = homog::run_directory(output, spec);
    std::cout << "run dir: " << run_dir << "\n";
    const homog::ExperimentReport rep = homog::run_experiment(spec, workers, run_dir);
    std::cout << "experiment " << to_string(spec.name)
              << (rep.pass ? ": PASS" : ": FAIL") << " ("
              << rep.doc["n_samples_completed"] << " samples, " << rep.n_failed_samples
              << " failures)\n";
    return rep.pass ? 0 : 2;
}

int cmd_corrector(const std::string& kind, double lambda, double p, int block, int dim,
                  int side, double T, std::uint64_t seed, std::uint64_t index,
                  const std::string& out_dir) {
    const homog::TorusGrid grid(dim, side);
    const homog::EnsembleSpec ens = homog::parse_ensemble(kind, lambda, p, block);
    const homog::CoefficientField a = homog::sample(ens, grid, seed, index);
    homog::SolverConfig cfg;
    const homog::ExtendedCorrector ec = homog::assemble_extended_corrector(a, T, 0, cfg);
    homog::save_corrector_bundle(out_dir, ec, ens.to_string(), ens.hash(), seed, index);
    std::cout << "corrector bundle written to " << out_dir << "\n"
              << "  cg residual        " << ec.cg_rel_residual << "\n"
              << "  helmholtz residual " << ec.helmholtz_residual << "\n"
              << "  a_hT column       ";
    for (int i = 0; i < dim; ++i) std::cout << " " << ec.a_hT_column[i];
    std::cout << "\n";
    return 0;
}

int cmd_report(const std::string& run_dir, bool csv_mode) {
    std::ifstream is(run_dir + "/report.json");
    if (!is) {
        std::cerr << "error: no report.json in " << run_dir << "\n";
        return 1;
    }
    json doc;
    is >> doc;

    if (csv_mode) {
        std::cout << "# homog-csv v1\nparameter_name,parameter,estimate,stderr,N\n";
        for (const json& row : doc["rungs"])
            std::cout << row["parameter_name"].get<std::string>() << ","
                      << row["parameter"].get<double>() << ","
                      << row["estimate"].get<double>() << "," << row["stderr"].get<double>()
                      << "," << row["N"].get<int>() << "\n";
        return 0;
    }

    std::cout << "experiment: " << doc["experiment"].get<std::string>() << "\n"
              << "samples:    " << doc["n_samples_completed"] << " completed, "
              << doc["failures"].size() << " failed\n";
    if (doc.contains("fits"))
        for (const auto& [key, fit] : doc["fits"].items()) {
            std::cout << "fit " << key << ": ";
            if (fit.contains("slope"))
                std::cout << "slope " << fit["slope"].get<double>() << " (stderr "
                          << fit.value("stderr", 0.0) << ", R^2 " << fit.value("r_squared", 0.0)
                          << ")";
            std::cout << "\n";
        }
    std::cout << "criteria:\n";
    for (const json& c : doc["criteria"]) {
        std::cout << "  " << (c["pass"].get<bool>() ? "PASS" : "FAIL") << "  "
                  << c["name"].get<std::string>();
        if (c.contains("value")) std::cout << "  value " << c["value"].get<double>();
        if (c.contains("target"))
            std::cout << "  target " << c["target"].get<double>() << " +- "
                      << c["tol"].get<double>();
        std::cout << "\n";
    }
    std::cout << "overall: " << (doc["pass"].get<bool>() ? "PASS" : "FAIL") << "\n";
    return 0;
}

int cmd_dump_field(const std::string& path, bool as_json) {
    const homog::LoadedField f = homog::load_field(path);
    if (as_json) {
        json j;
        j["dim"] = f.grid.dim;
        j["side"] = f.grid.side;
        j["components"] = f.n_comp;
        j["values"] = f.data;
        std::cout << j.dump() << "\n";
        return 0;
    }
    double lo = f.data.empty() ? 0.0 : f.data[0], hi = lo, sum = 0.0;
    for (double v : f.data) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        sum += v;
    }
    std::cout << "field: d=" << f.grid.dim << " L=" << f.grid.side
              << " components=" << f.n_comp << "\n"
              << "min " << lo << "  max " << hi << "  mean "
              << (f.data.empty() ? 0.0 : sum / static_cast<double>(f.data.size())) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantitative stochastic homogenization laboratory"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run an experiment from a config file");
    std::string config_path, output;
    int workers = 0;
    std::vector<std::string> overrides;
    run->add_option("config", config_path, "config file (key = value lines)")->required();
    run->add_option("--output", output, "output root directory");
    run->add_option("--workers", workers, "worker threads (default HOMOG_WORKERS or 2)");
    run->add_option("--set", overrides, "override a config key (key=value)");

    auto* corr = app.add_subcommand("corrector", "solve one extended corrector bundle");
    std::string ens_kind = "bernoulli", corr_out = "corrector-out";
    double lambda = 0.25, p = 0.5, T = 64.0;
    int block = 4, dim = 2, side = 32;
    std::uint64_t seed = 1, index = 0;
    corr->add_option("--ensemble", ens_kind, "bernoulli|uniform|block");
    corr->add_option("--lambda", lambda, "ellipticity ratio in (0,1)");
    corr->add_option("--p", p, "bernoulli contrast probability");
    corr->add_option("--block", block, "block size m");
    corr->add_option("--dim", dim, "dimension (2 or 3)");
    corr->add_option("--side", side, "lattice side L (power of two)");
    corr->add_option("--T", T, "massive cutoff");
    corr->add_option("--seed", seed, "master seed");
    corr->add_option("--index", index, "sample index");
    corr->add_option("--out", corr_out, "output directory");

    auto* rept = app.add_subcommand("report", "summarize a run directory");
    std::string run_dir;
    bool csv_mode = false;
    rept->add_option("rundir", run_dir, "run directory with report.json")->required();
    rept->add_flag("--csv", csv_mode, "machine-readable CSV only");

    auto* dump = app.add_subcommand("dump-field", "inspect a field binary");
    std::string field_path;
    bool as_json = false;
    dump->add_option("file", field_path, "field binary (HLF1)")->required();
    dump->add_flag("--json", as_json, "dump full values as JSON");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, overrides, output, workers);
        if (corr->parsed())
            return cmd_corrector(ens_kind, lambda, p, block, dim, side, T, seed, index,
                                 corr_out);
        if (rept->parsed()) return cmd_report(run_dir, csv_mode);
        if (dump->parsed()) return cmd_dump_field(field_path, as_json);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
