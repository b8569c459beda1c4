#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "twosided/cli.hpp"

namespace {

using twosided::cli::ScenarioConfig;

// Flag values; every field stays empty unless given on the command line so the
// config file keeps its value.
struct Flags
{
    std::optional<std::string> config_path;
    std::optional<std::string> out_path;
    std::optional<std::string> format;
    std::optional<std::string> units;
    std::optional<std::uint64_t> seed;

    std::optional<double> d, n, c;
    std::optional<double> kappa, J;
    std::optional<double> Omega, omega0, phi, Delta;

    std::optional<std::string> model;
    std::optional<double> T, dt;
    bool no_gate = false;
    std::optional<std::size_t> stride;
    std::optional<int> n_max;
    bool allow_small_cutoff = false;
    std::vector<double> initial;

    std::optional<std::string> sweep;
    std::optional<double> start, stop;
    std::optional<std::size_t> points;

    std::optional<double> inject_kappa_scale;
};

void add_common_flags(CLI::App &cmd, Flags &f)
{
    cmd.add_option("--config", f.config_path, "JSON scenario file; flags override its fields");
    cmd.add_option("--out", f.out_path, "output file (default stdout)");
    cmd.add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    cmd.add_option("--units", f.units, "natural (nd/c = 1) or si")->check(CLI::IsMember({"natural", "si"}));
    cmd.add_option("--seed", f.seed, "seed for the randomized grids");

    cmd.add_option("--n", f.n, "refractive index");
    cmd.add_option("--d", f.d, "slab thickness (si units)");
    cmd.add_option("--c", f.c, "speed of light (si units)");
    cmd.add_option("--kappa", f.kappa, "direct override: decay rate");
    cmd.add_option("--J", f.J, "direct override: left/right coupling");
    cmd.add_option("--Omega", f.Omega, "Rabi frequency");
    cmd.add_option("--omega0", f.omega0, "drive frequency");
    cmd.add_option("--phi", f.phi, "drive as round-trip phase");
    cmd.add_option("--Delta", f.Delta, "detuning from the nearest resonance");

    cmd.add_option("--model", f.model, "traveling5, single_mode, reduced_total or lindblad");
    cmd.add_option("--T", f.T, "duration");
    cmd.add_option("--dt", f.dt, "RK4 step");
    cmd.add_flag("--no-gate", f.no_gate, "disable the step-halving convergence gate");
    cmd.add_option("--stride", f.stride, "keep every stride-th step");
    cmd.add_option("--n-max", f.n_max, "Fock cutoff per mode (lindblad)");
    cmd.add_flag("--allow-small-cutoff", f.allow_small_cutoff, "proceed with n_max below the heuristic");
    cmd.add_option("--initial", f.initial, "initial state components")->expected(1, 5)->delimiter(',');

    cmd.add_option("--sweep", f.sweep, "sweep variable (phi or Delta)");
    cmd.add_option("--start", f.start, "sweep start");
    cmd.add_option("--stop", f.stop, "sweep stop");
    cmd.add_option("--points", f.points, "sweep point count");
}

ScenarioConfig build_config(const Flags &f)
{
    ScenarioConfig cfg;
    if (f.config_path) {
        std::ifstream in(*f.config_path);
        if (!in)
            throw twosided::cli::usage_error("cannot read config file " + *f.config_path);
        nlohmann::json doc;
        try {
            in >> doc;
        } catch (const nlohmann::json::exception &e) {
            throw twosided::cli::usage_error(std::string("config is not valid JSON: ") + e.what());
        }
        cfg = twosided::cli::config_from_json(doc);
    }

    const bool geometry_flags = f.n || f.d || f.c;
    const bool direct_flags = f.kappa || f.J;
    if (geometry_flags && direct_flags)
        throw twosided::cli::usage_error("give exactly one parameter source: geometry or direct (kappa, J)");
    // A source given by flags replaces the other source from the file.
    if (geometry_flags) {
        cfg.direct.reset();
        auto &g = cfg.geometry.emplace(cfg.geometry.value_or(twosided::cli::GeometrySpec{}));
        if (f.n) g.n = f.n;
        if (f.d) g.d = f.d;
        if (f.c) g.c = f.c;
    }
    if (direct_flags) {
        cfg.geometry.reset();
        auto &dspec = cfg.direct.emplace(cfg.direct.value_or(twosided::cli::DirectSpec{}));
        if (f.kappa) dspec.kappa = f.kappa;
        if (f.J) dspec.J = f.J;
    }

    if (f.Omega) cfg.Omega = *f.Omega;
    if (f.omega0) cfg.omega0 = f.omega0;
    if (f.phi) cfg.phi = f.phi;
    if (f.Delta) cfg.Delta = f.Delta;
    if (f.model) cfg.model = *f.model;
    if (f.T) cfg.T = *f.T;
    if (f.dt) cfg.dt = f.dt;
    if (f.no_gate) cfg.convergence_gate = false;
    if (f.stride) cfg.stride = *f.stride;
    if (f.n_max) cfg.n_max = f.n_max;
    if (f.allow_small_cutoff) cfg.allow_small_cutoff = true;
    if (!f.initial.empty()) cfg.initial = f.initial;
    if (f.sweep) cfg.sweep.variable = *f.sweep;
    if (f.start) cfg.sweep.start = f.start;
    if (f.stop) cfg.sweep.stop = f.stop;
    if (f.points) cfg.sweep.points = f.points;
    if (f.out_path) cfg.out_path = f.out_path;
    if (f.format) cfg.format = *f.format;
    if (f.units) cfg.units = *f.units;
    if (f.seed) cfg.seed = f.seed;
    if (f.inject_kappa_scale) cfg.kappa_scale = *f.inject_kappa_scale;
    return cfg;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Two-sided optical cavity: classical scattering vs traveling-wave photon dynamics"};
    app.require_subcommand(1);

    Flags flags;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"sweep-transmission", "classical R/T and quantum emission ratios across the round-trip phase"},
        {"steady", "stationary photon numbers and emission rates (or a Delta sweep)"},
        {"evolve", "trajectory of the rate equations or the master equation"},
        {"consistency", "run the consistency checks; exit 3 if any fails"},
    };
    for (const auto &[name, help] : commands) {
        CLI::App *cmd = app.add_subcommand(name, help);
        add_common_flags(*cmd, flags);
        if (name == "consistency")
            cmd->add_option("--inject-kappa-scale", flags.inject_kappa_scale,
                            "multiply kappa in the ratio checks (fault injection)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : twosided::cli::exit_usage;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    ScenarioConfig cfg;
    try {
        cfg = build_config(flags);
    } catch (const std::exception &e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return twosided::cli::exit_usage;
    }

    if (cfg.out_path) {
        std::ofstream file(*cfg.out_path, std::ios::binary);
        if (!file) {
            std::cerr << "cannot open output file " << *cfg.out_path << '\n';
            return twosided::cli::exit_usage;
        }
        const int code = twosided::cli::run_command(command, cfg, file, std::cerr);
        file.flush();
        if (!file) {
            std::cerr << "write failed for " << *cfg.out_path << '\n';
            return twosided::cli::exit_usage;
        }
        return code;
    }
    return twosided::cli::run_command(command, cfg, std::cout, std::cerr);
}
