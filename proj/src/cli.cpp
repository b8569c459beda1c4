#include "twosided/cli.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <set>
#include <sstream>

#include "twosided/classical_scattering.hpp"
#include "twosided/consistency.hpp"
#include "twosided/lindblad.hpp"
#include "twosided/numerics.hpp"
#include "twosided/rate_dynamics.hpp"

namespace twosided::cli {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json &obj, const std::set<std::string> &allowed, const std::string &where)
{
    if (!obj.is_object())
        throw usage_error("config: '" + where + "' must be an object");
    for (const auto &item : obj.items())
        if (!allowed.contains(item.key()))
            throw usage_error("config: unknown key '" + item.key() + "' in " + where);
}

template <typename T>
std::optional<T> optional_field(const json &obj, const char *key)
{
    if (!obj.contains(key) || obj.at(key).is_null())
        return std::nullopt;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception &e) {
        throw usage_error(std::string("config: bad value for '") + key + "': " + e.what());
    }
}

class CsvWriter
{
public:
    CsvWriter(std::ostream &out, const std::vector<std::string> &columns) : out_(out)
    {
        out_ << std::setprecision(17);
        for (std::size_t i = 0; i < columns.size(); ++i)
            out_ << (i ? "," : "") << columns[i];
        out_ << '\n';
    }

    void row(const std::vector<double> &values)
    {
        for (std::size_t i = 0; i < values.size(); ++i)
            out_ << (i ? "," : "") << values[i];
        out_ << '\n';
    }

private:
    std::ostream &out_;
};

// Collects rows either as CSV or as a {"columns": [...], "rows": [[...]]} document.
class TableSink
{
public:
    TableSink(std::ostream &out, std::string format, std::vector<std::string> columns)
        : out_(out), format_(std::move(format)), columns_(std::move(columns))
    {
    }

    // Nothing is written until the first row, so a failed run leaves no partial header.
    void row(const std::vector<double> &values)
    {
        if (format_ != "csv") {
            rows_.push_back(values);
            return;
        }
        if (!csv_)
            csv_.emplace(out_, columns_);
        csv_->row(values);
    }

    void finish(const json &meta = json::object())
    {
        if (format_ == "csv") {
            if (!csv_)
                csv_.emplace(out_, columns_);
            return;
        }
        json doc{{"columns", columns_}, {"rows", rows_}};
        if (!meta.empty())
            doc["meta"] = meta;
        out_ << doc.dump(2) << '\n';
    }

private:
    std::ostream &out_;
    std::string format_;
    std::vector<std::string> columns_;
    std::optional<CsvWriter> csv_;
    json rows_ = json::array();
};

void check_format(const ScenarioConfig &cfg)
{
    if (cfg.format != "csv" && cfg.format != "json")
        throw usage_error("--format must be csv or json");
}

double drive_frequency(const ScenarioConfig &cfg, const CavityGeometry &geom)
{
    if (cfg.omega0 && cfg.phi)
        throw usage_error("give either omega0 or phi, not both");
    if (cfg.omega0)
        return *cfg.omega0;
    if (cfg.phi)
        return geom.frequency_for_phase(*cfg.phi);
    if (cfg.Delta)
        return resonance_frequency(geom, 1) - *cfg.Delta;
    throw usage_error("geometry-derived parameters need a drive: omega0, phi or Delta");
}

struct SweepRange
{
    double start;
    double stop;
    std::size_t points;
};

SweepRange sweep_range(const SweepSpec &s, double start, double stop, std::size_t points)
{
    SweepRange r{s.start.value_or(start), s.stop.value_or(stop), s.points.value_or(points)};
    if (r.points < 1)
        throw usage_error("sweep: points must be >= 1");
    if (!(r.stop > r.start) && r.points > 1)
        throw usage_error("sweep: range must be non-empty and ordered (start < stop)");
    return r;
}

StepperConfig stepper(const ScenarioConfig &cfg, double default_dt)
{
    StepperConfig s;
    s.dt = cfg.dt.value_or(default_dt);
    s.convergence_gate = cfg.convergence_gate;
    s.stride = cfg.stride;
    return s;
}

std::vector<double> state_row(double t, const RateState5 &s, const EmissionRates &rates)
{
    return {t, s.n_L, s.n_R, s.k1, s.k2, s.k3, rates.I_L, rates.I_R, rates.I_tot};
}

const std::vector<std::string> trajectory_columns{"t",  "n_L", "n_R", "k1",   "k2",
                                                  "k3", "I_L", "I_R", "I_tot"};

} // namespace

ScenarioConfig config_from_json(const json &doc)
{
    reject_unknown_keys(doc, {"geometry", "direct", "drive", "run", "sweep", "output", "units", "seed"},
                        "top level");
    ScenarioConfig cfg;
    if (doc.contains("geometry")) {
        const json &g = doc.at("geometry");
        reject_unknown_keys(g, {"d", "n", "c"}, "geometry");
        cfg.geometry = GeometrySpec{optional_field<double>(g, "d"), optional_field<double>(g, "n"),
                                    optional_field<double>(g, "c")};
    }
    if (doc.contains("direct")) {
        const json &d = doc.at("direct");
        reject_unknown_keys(d, {"kappa", "J"}, "direct");
        cfg.direct = DirectSpec{optional_field<double>(d, "kappa"), optional_field<double>(d, "J")};
    }
    if (doc.contains("drive")) {
        const json &d = doc.at("drive");
        reject_unknown_keys(d, {"Omega", "omega0", "phi", "Delta"}, "drive");
        cfg.Omega = optional_field<double>(d, "Omega").value_or(cfg.Omega);
        cfg.omega0 = optional_field<double>(d, "omega0");
        cfg.phi = optional_field<double>(d, "phi");
        cfg.Delta = optional_field<double>(d, "Delta");
    }
    if (doc.contains("run")) {
        const json &r = doc.at("run");
        reject_unknown_keys(r, {"model", "T", "dt", "gate", "stride", "n_max", "allow_small_cutoff", "initial"},
                            "run");
        cfg.model = optional_field<std::string>(r, "model").value_or(cfg.model);
        cfg.T = optional_field<double>(r, "T").value_or(cfg.T);
        cfg.dt = optional_field<double>(r, "dt");
        cfg.convergence_gate = optional_field<bool>(r, "gate").value_or(cfg.convergence_gate);
        cfg.stride = optional_field<std::size_t>(r, "stride").value_or(cfg.stride);
        cfg.n_max = optional_field<int>(r, "n_max");
        cfg.allow_small_cutoff = optional_field<bool>(r, "allow_small_cutoff").value_or(false);
        cfg.initial = optional_field<std::vector<double>>(r, "initial").value_or(std::vector<double>{});
    }
    if (doc.contains("sweep")) {
        const json &s = doc.at("sweep");
        reject_unknown_keys(s, {"variable", "start", "stop", "points"}, "sweep");
        cfg.sweep.variable = optional_field<std::string>(s, "variable").value_or("");
        cfg.sweep.start = optional_field<double>(s, "start");
        cfg.sweep.stop = optional_field<double>(s, "stop");
        cfg.sweep.points = optional_field<std::size_t>(s, "points");
    }
    if (doc.contains("output")) {
        const json &o = doc.at("output");
        reject_unknown_keys(o, {"path", "format"}, "output");
        cfg.out_path = optional_field<std::string>(o, "path");
        cfg.format = optional_field<std::string>(o, "format").value_or(cfg.format);
    }
    cfg.units = optional_field<std::string>(doc, "units").value_or(cfg.units);
    cfg.seed = optional_field<std::uint64_t>(doc, "seed");
    return cfg;
}

CavityGeometry resolve_geometry(const ScenarioConfig &cfg)
{
    if (!cfg.geometry)
        throw usage_error("this command needs a geometry (n, and d, c with --units si)");
    const GeometrySpec &g = *cfg.geometry;
    if (!g.n)
        throw usage_error("geometry: refractive index n is required");
    if (cfg.units == "natural") {
        if (g.d || g.c)
            throw usage_error("natural units fix n d / c = 1: drop d and c or use --units si");
        return CavityGeometry::natural(*g.n);
    }
    if (cfg.units == "si") {
        if (!g.d || !g.c)
            throw usage_error("--units si requires d, n and c");
        return CavityGeometry(*g.d, *g.n, *g.c);
    }
    throw usage_error("--units must be natural or si");
}

TravelingWaveParams resolve_params(const ScenarioConfig &cfg)
{
    if (cfg.geometry.has_value() == cfg.direct.has_value())
        throw usage_error("give exactly one parameter source: geometry or direct (kappa, J)");

    TravelingWaveParams p;
    p.rabi_Omega = cfg.Omega;
    if (cfg.direct) {
        if (!cfg.direct->kappa)
            throw usage_error("direct override: kappa is required");
        p.kappa = *cfg.direct->kappa;
        if (cfg.direct->J)
            p.coupling_J = *cfg.direct->J;
        else if (cfg.Delta)
            p.coupling_J = coupling_near_resonant(*cfg.Delta);
        p.detuning_Delta = cfg.Delta.value_or(-0.5 * p.coupling_J);
    } else {
        const CavityGeometry geom = resolve_geometry(cfg);
        const double omega0 = drive_frequency(cfg, geom);
        if (!(omega0 >= 0.0))
            throw usage_error("drive frequency must be >= 0");
        p.kappa = kappa_exact(geom);
        p.coupling_J = coupling_exact(geom, omega0);
        p.detuning_Delta = omega0 > 0.0 ? nearest_detuning(geom, omega0).Delta : 0.0;
    }
    try {
        p.validate();
    } catch (const std::invalid_argument &e) {
        throw usage_error(e.what());
    }
    return p;
}

int cmd_sweep_transmission(const ScenarioConfig &cfg, std::ostream &out, std::ostream &log)
{
    check_format(cfg);
    if (cfg.direct)
        throw usage_error("sweep-transmission derives kappa and J from the geometry; drop the direct override");
    if (!cfg.sweep.variable.empty() && cfg.sweep.variable != "phi")
        throw usage_error("sweep-transmission sweeps phi only");
    const CavityGeometry geom = resolve_geometry(cfg);
    const SweepRange range = sweep_range(cfg.sweep, 0.0, 2.0 * std::numbers::pi, 1000);
    if (range.start < 0.0)
        throw usage_error("sweep-transmission: phi must be >= 0");

    const double kappa = kappa_exact(geom);
    TableSink table(out, cfg.format, {"phi", "R_cav", "T_cav", "ratio_L", "ratio_R"});
    double worst = 0.0;
    for (double phi : linspace(range.start, range.stop, range.points)) {
        const double omega0 = geom.frequency_for_phase(phi);
        const ScatteringRates classical = cavity_rates(geom, omega0);
        TravelingWaveParams p;
        p.kappa = kappa;
        p.coupling_J = coupling_exact(geom, omega0);
        p.rabi_Omega = cfg.Omega;
        const EmissionRates q = steady_emission_split(p);
        const double ratio_L = q.I_tot > 0.0 ? q.I_L / q.I_tot : 0.0;
        const double ratio_R = q.I_tot > 0.0 ? q.I_R / q.I_tot : 1.0;
        worst = std::max({worst, std::abs(ratio_L - classical.R_cav), std::abs(ratio_R - classical.T_cav)});
        table.row({phi, classical.R_cav, classical.T_cav, ratio_L, ratio_R});
    }
    table.finish({{"n", geom.refractive_index()},
                  {"transit_time", geom.transit_time()},
                  {"finesse", finesse(fresnel_coefficients(geom.refractive_index()).r)}});
    log << "sweep-transmission: " << range.points << " points, max |ratio - classical| = "
        << std::setprecision(17) << worst << '\n';
    return exit_ok;
}

int cmd_steady(const ScenarioConfig &cfg, std::ostream &out, std::ostream &log)
{
    check_format(cfg);
    const TravelingWaveParams p = resolve_params(cfg);

    if (cfg.sweep.variable == "Delta") {
        // Lorentzian mode: J = -2 Delta at fixed kappa and Omega.
        const SweepRange range = sweep_range(cfg.sweep, -2.0 * p.kappa, 2.0 * p.kappa, 401);
        TableSink table(out, cfg.format,
                        {"Delta", "n_L", "n_R", "I_L", "I_R", "I_tot", "I_lorentzian"});
        for (double Delta : linspace(range.start, range.stop, range.points)) {
            TravelingWaveParams q = p;
            q.coupling_J = coupling_near_resonant(Delta);
            q.detuning_Delta = Delta;
            const RateState5 ss = traveling_steady_state(q);
            const EmissionRates rates = emission_rates(ss, q.kappa);
            table.row({Delta, ss.n_L, ss.n_R, rates.I_L, rates.I_R, rates.I_tot,
                       lorentzian_total_rate(q.rabi_Omega, Delta, q.kappa)});
        }
        table.finish({{"kappa", p.kappa}, {"Omega", p.rabi_Omega}});
        log << "steady: Delta sweep, half maximum expected at Delta = +-" << std::setprecision(17)
            << 0.5 * p.kappa << '\n';
        return exit_ok;
    }
    if (!cfg.sweep.variable.empty())
        throw usage_error("steady: only a Delta sweep is supported");

    const RateState5 ss = traveling_steady_state(p);
    const EmissionRates rates = steady_emission_split(p);
    const json doc{{"kappa", p.kappa}, {"J", p.coupling_J}, {"Omega", p.rabi_Omega},
                   {"n_L", ss.n_L},    {"n_R", ss.n_R},     {"k1", ss.k1},
                   {"k2", ss.k2},      {"k3", ss.k3},       {"I_L", rates.I_L},
                   {"I_R", rates.I_R}, {"I_tot", rates.I_tot}};
    std::ostringstream text;
    text << std::setprecision(17);
    const std::vector<std::pair<std::string, double>> rows{
        {"kappa", p.kappa}, {"J", p.coupling_J}, {"Omega", p.rabi_Omega},
        {"n_L", ss.n_L},    {"n_R", ss.n_R},     {"I_L", rates.I_L},
        {"I_R", rates.I_R}, {"I_tot", rates.I_tot}};
    for (const auto &[name, value] : rows)
        text << std::left << std::setw(8) << name << std::right << std::setw(26) << value << '\n';

    // Both renderings are always produced; --format picks which one goes to the output.
    if (cfg.format == "json") {
        out << doc.dump(2) << '\n';
        log << text.str();
    } else {
        out << text.str();
        log << doc.dump() << '\n';
    }
    return exit_ok;
}

int cmd_evolve(const ScenarioConfig &cfg, std::ostream &out, std::ostream &log)
{
    check_format(cfg);
    if (!(cfg.T >= 0.0))
        throw usage_error("evolve: T must be >= 0");
    if (cfg.stride < 1)
        throw usage_error("evolve: stride must be >= 1");
    const TravelingWaveParams p = resolve_params(cfg);
    TableSink table(out, cfg.format, trajectory_columns);
    const json meta{{"model", cfg.model}, {"kappa", p.kappa}, {"J", p.coupling_J},
                    {"Omega", p.rabi_Omega}, {"Delta", p.detuning_Delta}};

    if (cfg.model == "traveling5") {
        if (cfg.initial.size() > 5)
            throw usage_error("traveling5: initial state has at most 5 entries (n_L, n_R, k1, k2, k3)");
        std::array<double, 5> init{};
        std::copy(cfg.initial.begin(), cfg.initial.end(), init.begin());
        const auto traj = evolve_traveling(p, RateState5::from_array(init), cfg.T,
                                           stepper(cfg, default_step(p)));
        for (std::size_t i = 0; i < traj.size(); ++i)
            table.row(state_row(traj.times[i], traj.states[i], emission_rates(traj.states[i], p.kappa)));
        table.finish(meta);
        return exit_ok;
    }

    if (cfg.model == "single_mode" || cfg.model == "reduced_total") {
        if (cfg.initial.size() > 3)
            throw usage_error(cfg.model + ": initial state has at most 3 entries (n, k1, k2)");
        std::array<double, 3> init{};
        std::copy(cfg.initial.begin(), cfg.initial.end(), init.begin());
        const SingleModeState s0{init[0], init[1], init[2]};
        const double Delta = p.detuning_Delta;
        const StepperConfig sc = stepper(cfg, default_step(p.rabi_Omega, Delta, p.kappa));
        const auto traj = cfg.model == "single_mode"
                              ? evolve_single_mode(p.rabi_Omega, Delta, p.kappa, s0, cfg.T, sc)
                              : evolve_reduced_total(p.rabi_Omega, Delta, p.kappa, s0, cfg.T, sc);
        // The photon number is reported in the n_R column (resonant identification n <-> n_R).
        for (std::size_t i = 0; i < traj.size(); ++i) {
            const SingleModeState &s = traj.states[i];
            const double I = p.kappa * s.n;
            table.row({traj.times[i], 0.0, s.n, s.k1, s.k2, 0.0, 0.0, I, I});
        }
        table.finish(meta);
        return exit_ok;
    }

    if (cfg.model == "lindblad") {
        if (cfg.initial.size() > 5)
            throw usage_error("lindblad: initial state has at most 5 entries");
        std::array<double, 5> init{};
        std::copy(cfg.initial.begin(), cfg.initial.end(), init.begin());
        for (int k = 0; k < 2; ++k)
            if (init[k] < 0.0 || init[k] != std::floor(init[k]))
                throw usage_error("lindblad: initial n_L, n_R must be non-negative integers (Fock state)");
        if (init[2] != 0.0 || init[3] != 0.0 || init[4] != 0.0)
            throw usage_error("lindblad: initial state must be a Fock state (k1 = k2 = k3 = 0)");

        double mu = std::max(init[0], init[1]);
        if (p.kappa > 0.0) {
            const RateState5 ss = traveling_steady_state(p);
            mu = std::max({mu, ss.n_L, ss.n_R});
        }
        const int recommended = recommended_cutoff(mu);
        const int n_max = cfg.n_max.value_or(recommended);
        if (n_max < recommended) {
            log << "warning: n_max = " << n_max << " is below the recommended cutoff " << recommended
                << " for mean photon number " << mu << '\n';
            if (!cfg.allow_small_cutoff)
                throw usage_error("n_max below the truncation heuristic; pass --allow-small-cutoff to proceed");
        }
        if (init[0] > n_max || init[1] > n_max)
            throw usage_error("lindblad: initial Fock state exceeds n_max");

        const FockSpace space(n_max, 2);
        const InteractionHamiltonian H = interaction_hamiltonian(space, p.rabi_Omega, p.coupling_J);
        const LindbladGenerator generator(space, H.H, p.kappa);
        const ComplexMatrix rho0 =
            space.fock_state(static_cast<int>(init[0]), static_cast<int>(init[1]));
        const auto traj = evolve_density(rho0, generator, cfg.T, stepper(cfg, default_step(p)));
        for (std::size_t i = 0; i < traj.size(); ++i) {
            const Expectations e = expectations(traj.states[i], space, p.kappa);
            table.row(state_row(traj.times[i], e.state, e.rates));
        }
        json lmeta = meta;
        lmeta["n_max"] = n_max;
        table.finish(lmeta);
        return exit_ok;
    }

    throw usage_error("unknown model '" + cfg.model
                      + "' (expected traveling5, single_mode, reduced_total or lindblad)");
}

int cmd_consistency(const ScenarioConfig &cfg, std::ostream &out, std::ostream &log)
{
    SuiteOptions opts;
    opts.kappa_scale = cfg.kappa_scale;
    opts.fuzz_seed = cfg.seed;
    const auto reports = run_consistency_suite(opts);
    bool all_pass = true;
    for (const auto &rep : reports) {
        log << rep.to_text() << '\n';
        all_pass = all_pass && rep.pass;
    }
    out << reports_to_json(reports).dump(2) << '\n';
    return all_pass ? exit_ok : exit_consistency;
}

int run_command(const std::string &command, const ScenarioConfig &cfg, std::ostream &out,
                std::ostream &log)
{
    try {
        if (command == "sweep-transmission")
            return cmd_sweep_transmission(cfg, out, log);
        if (command == "steady")
            return cmd_steady(cfg, out, log);
        if (command == "evolve")
            return cmd_evolve(cfg, out, log);
        if (command == "consistency")
            return cmd_consistency(cfg, out, log);
        throw usage_error("unknown command '" + command + "'");
    } catch (const usage_error &e) {
        log << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const numerical_error &e) {
        log << "numerical failure: " << e.what() << '\n';
        return exit_numerical;
    } catch (const std::logic_error &e) {
        // invalid_argument / domain_error from the library: bad scenario values
        log << "usage error: " << e.what() << '\n';
        return exit_usage;
    }
}

} // namespace twosided::cli
