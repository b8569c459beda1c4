#include "twosided/consistency.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "twosided/cavity_parameters.hpp"
#include "twosided/numerics.hpp"
#include "twosided/rate_dynamics.hpp"

namespace twosided {

namespace {

std::string fmt17(double x)
{
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

void finalize(ConsistencyReport &rep)
{
    rep.pass = !rep.tolerance || rep.max_deviation <= *rep.tolerance;
}

// count phases strictly inside (0, 2 pi)
std::vector<double> open_phase_grid(std::size_t count)
{
    std::vector<double> grid;
    grid.reserve(count);
    const double step = 2.0 * std::numbers::pi / static_cast<double>(count + 1);
    for (std::size_t k = 1; k <= count; ++k)
        grid.push_back(static_cast<double>(k) * step);
    return grid;
}

double index_for_reflectivity(double r)
{
    return (1.0 + r) / (1.0 - r);
}

} // namespace

std::string ConsistencyReport::to_text() const
{
    std::ostringstream os;
    os << (pass ? "PASS " : "FAIL ") << name << " max_dev=" << fmt17(max_deviation)
       << " tol=" << (tolerance ? fmt17(*tolerance) : std::string("none")) << " grid=[" << grid
       << "]";
    if (!worst_point.empty())
        os << " worst=" << worst_point;
    return os.str();
}

nlohmann::json ConsistencyReport::to_json() const
{
    nlohmann::json j;
    j["name"] = name;
    j["grid"] = grid;
    if (std::isfinite(max_deviation))
        j["max_dev"] = max_deviation;
    else
        j["max_dev"] = nullptr;
    if (tolerance)
        j["tol"] = *tolerance;
    else
        j["tol"] = nullptr;
    j["pass"] = pass;
    j["gated"] = tolerance.has_value();
    j["worst"] = worst_point;
    return j;
}

ConsistencyReport check_flux_condition(const CavityGeometry &geom, const std::vector<double> &t_grid)
{
    ConsistencyReport rep;
    rep.name = "flux_condition[n=" + fmt17(geom.refractive_index()) + "]";
    rep.tolerance = 1e-12;
    std::ostringstream g;
    g << t_grid.size() << " times";
    if (!t_grid.empty())
        g << " in [" << t_grid.front() << ", " << t_grid.back() << "]";
    g << ", nd/c=" << geom.transit_time();
    rep.grid = g.str();

    const double kappa = kappa_exact(geom);
    for (double t : t_grid) {
        const double classical = undriven_intensity(geom, t, 1.0);
        const double quantum = std::exp(-kappa * t);
        const double dev = std::abs(classical - quantum);
        if (dev > rep.max_deviation || rep.worst_point.empty()) {
            rep.max_deviation = std::max(rep.max_deviation, dev);
            rep.worst_point = "t=" + fmt17(t);
        }
    }
    finalize(rep);
    return rep;
}

ConsistencyReport check_ratio_identity(const CavityGeometry &geom, const std::vector<double> &phi_grid,
                                       double kappa_scale)
{
    ConsistencyReport rep;
    rep.name = "ratio_identity[n=" + fmt17(geom.refractive_index()) + "]";
    rep.tolerance = 1e-12;
    std::ostringstream g;
    g << phi_grid.size() << " phases";
    if (!phi_grid.empty())
        g << " in [" << phi_grid.front() << ", " << phi_grid.back() << "]";
    if (kappa_scale != 1.0)
        g << ", kappa scaled by " << kappa_scale;
    rep.grid = g.str();

    const double kappa = kappa_exact(geom) * kappa_scale;
    for (double phi : phi_grid) {
        const double omega0 = geom.frequency_for_phase(phi);
        const double J = coupling_exact(geom, omega0);
        const ScatteringRates classical = cavity_rates(geom, omega0);
        const double denom = J * J + kappa * kappa;
        const double dev = std::max(std::abs(J * J / denom - classical.R_cav),
                                    std::abs(kappa * kappa / denom - classical.T_cav));
        if (dev > rep.max_deviation || rep.worst_point.empty()) {
            rep.max_deviation = std::max(rep.max_deviation, dev);
            rep.worst_point = "phi=" + fmt17(phi);
        }
    }
    finalize(rep);
    return rep;
}

ConsistencyReport compare_near_resonant(double Omega, double Delta, double kappa, double duration)
{
    if (!(kappa > 0.0))
        throw std::invalid_argument("compare_near_resonant: kappa must be > 0");
    ConsistencyReport rep;
    rep.name = "near_resonant_equivalence[Delta/kappa=" + fmt17(Delta / kappa) + "]";
    rep.tolerance = 1e-9;

    TravelingWaveParams p;
    p.kappa = kappa;
    p.coupling_J = coupling_near_resonant(Delta);
    p.rabi_Omega = Omega;
    p.detuning_Delta = Delta;

    StepperConfig cfg;
    cfg.dt = default_step(p);
    const auto traveling = evolve_traveling(p, RateState5{}, duration, cfg);
    const auto single = evolve_single_mode(Omega, Delta, kappa, SingleModeState{}, duration, cfg);

    std::ostringstream g;
    g << "t in [0, " << duration << "], Omega=" << Omega << ", kappa=" << kappa;
    rep.grid = g.str();

    if (traveling.times != single.times) {
        rep.max_deviation = std::numeric_limits<double>::infinity();
        rep.worst_point = "time grids differ";
        finalize(rep);
        return rep;
    }
    for (std::size_t i = 0; i < traveling.size(); ++i) {
        const double dev = std::abs(traveling.states[i].n_tot() - single.states[i].n);
        if (dev > rep.max_deviation || rep.worst_point.empty()) {
            rep.max_deviation = std::max(rep.max_deviation, dev);
            rep.worst_point = "t=" + fmt17(traveling.times[i]);
        }
    }
    finalize(rep);
    return rep;
}

ConsistencyReport near_resonant_approximation_gap(const CavityGeometry &geom, int mode_index,
                                                  const std::vector<double> &detunings)
{
    ConsistencyReport rep;
    rep.name = "near_resonant_gap[n=" + fmt17(geom.refractive_index()) + ",m="
               + std::to_string(mode_index) + "]";
    std::ostringstream g;
    g << detunings.size() << " detunings, relative gap ||J_exact| - 2|Delta|| / (2|Delta|)";
    rep.grid = g.str();

    const double omega_m = resonance_frequency(geom, mode_index);
    for (double Delta : detunings) {
        if (Delta == 0.0)
            continue;
        const double J = coupling_exact(geom, omega_m - Delta);
        const double rule = std::abs(coupling_near_resonant(Delta));
        const double gap = std::abs(std::abs(J) - rule) / rule;
        if (gap > rep.max_deviation || rep.worst_point.empty()) {
            rep.max_deviation = std::max(rep.max_deviation, gap);
            rep.worst_point = "Delta=" + fmt17(Delta);
        }
    }
    finalize(rep);
    return rep;
}

ConsistencyReport check_free_field_limit(double r, const std::vector<double> &scale_grid)
{
    if (!(r > 0.0 && r < 1.0))
        throw std::invalid_argument("check_free_field_limit: r must lie in (0, 1)");
    ConsistencyReport rep;
    rep.name = "free_field_limit[r=" + fmt17(r) + "]";
    rep.tolerance = 1e-12;
    std::ostringstream g;
    g << scale_grid.size() << " values of nd/c";
    if (!scale_grid.empty())
        g << " in [" << scale_grid.front() << ", " << scale_grid.back() << "]";
    g << "; deviation = relative error of 1/(nd/c) scaling";
    rep.grid = g.str();

    const double n = index_for_reflectivity(r);
    double kappa_unit = 0.0;
    double j_unit = 0.0;
    double prev_kappa = std::numeric_limits<double>::infinity();
    double prev_j = std::numeric_limits<double>::infinity();
    for (double scale : scale_grid) {
        const CavityGeometry geom = CavityGeometry::with_transit_time(n, scale);
        const double kappa = kappa_exact(geom);
        // |sin| peaks at phi = pi/2, so this is sup over phi of |J|.
        const double j_sup = std::abs(coupling_exact(geom, geom.frequency_for_phase(std::numbers::pi / 2)));
        if (kappa_unit == 0.0) {
            kappa_unit = kappa * scale;
            j_unit = j_sup * scale;
        }
        const double dev = std::max(std::abs(kappa * scale - kappa_unit) / kappa_unit,
                                    std::abs(j_sup * scale - j_unit) / j_unit);
        if (dev > rep.max_deviation || rep.worst_point.empty()) {
            rep.max_deviation = std::max(rep.max_deviation, dev);
            rep.worst_point = "nd/c=" + fmt17(scale);
        }
        const bool monotone = kappa < prev_kappa && j_sup < prev_j;
        const bool vanishing = scale < 1e7 || (kappa < 1e-6 && j_sup < 1e-6);
        if (!monotone || !vanishing) {
            rep.max_deviation = std::numeric_limits<double>::infinity();
            rep.worst_point = "nd/c=" + fmt17(scale) + (monotone ? " (not below 1e-6)" : " (not decreasing)");
            break;
        }
        prev_kappa = kappa;
        prev_j = j_sup;
    }
    finalize(rep);
    return rep;
}

ConsistencyReport fuzz_ratio_identity(std::uint64_t seed, std::size_t count)
{
    ConsistencyReport rep;
    rep.name = "ratio_identity_fuzz[seed=" + std::to_string(seed) + "]";
    rep.tolerance = 1e-12;
    rep.grid = std::to_string(count) + " random (r, phi), r in (0, 0.999], phi in [0, 2pi)";

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> r_dist(1e-6, 0.999);
    std::uniform_real_distribution<double> phi_dist(0.0, 2.0 * std::numbers::pi);
    for (std::size_t i = 0; i < count; ++i) {
        const double r = r_dist(rng);
        const double phi = phi_dist(rng);
        const CavityGeometry geom = CavityGeometry::natural(index_for_reflectivity(r));
        const ConsistencyReport point = check_ratio_identity(geom, {phi});
        if (point.max_deviation > rep.max_deviation || rep.worst_point.empty()) {
            rep.max_deviation = std::max(rep.max_deviation, point.max_deviation);
            rep.worst_point = "r=" + fmt17(r) + ",phi=" + fmt17(phi);
        }
    }
    finalize(rep);
    return rep;
}

std::vector<ConsistencyReport> run_consistency_suite(const SuiteOptions &opts)
{
    std::vector<ConsistencyReport> reports;
    const std::vector<double> indices{1.5, 3.0, 20.0};
    const std::vector<double> times = linspace(0.0, 10.0, 1001);
    const std::vector<double> phases = open_phase_grid(1000);

    for (double n : indices)
        reports.push_back(check_flux_condition(CavityGeometry::natural(n), times));
    for (double n : indices)
        reports.push_back(check_ratio_identity(CavityGeometry::natural(n), phases, opts.kappa_scale));
    for (double ratio : {0.0, 0.1, 0.5, 1.0})
        reports.push_back(compare_near_resonant(1.0, ratio, 1.0, 10.0));
    reports.push_back(near_resonant_approximation_gap(CavityGeometry::natural(20.0), 1,
                                                      {1e-3, 1e-2, 1e-1}));
    reports.push_back(check_free_field_limit(
        0.5, {1.0, 10.0, 1e2, 1e3, 1e4, 1e5, 1e6, 1e7}));
    if (opts.fuzz_seed)
        reports.push_back(fuzz_ratio_identity(*opts.fuzz_seed, opts.fuzz_count));
    return reports;
}

nlohmann::json reports_to_json(const std::vector<ConsistencyReport> &reports)
{
    nlohmann::json checks = nlohmann::json::array();
    bool all_pass = true;
    for (const auto &rep : reports) {
        checks.push_back(rep.to_json());
        all_pass = all_pass && rep.pass;
    }
    return {{"checks", checks}, {"all_pass", all_pass}};
}

} // namespace twosided
