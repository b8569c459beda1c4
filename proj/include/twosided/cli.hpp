#ifndef TWOSIDED_CLI_HPP
#define TWOSIDED_CLI_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "twosided/cavity_parameters.hpp"

namespace twosided::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 1,
    exit_numerical = 2,
    exit_consistency = 3,
};

class usage_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct GeometrySpec
{
    std::optional<double> d;
    std::optional<double> n;
    std::optional<double> c;
};

struct DirectSpec
{
    std::optional<double> kappa;
    std::optional<double> J;
};

struct SweepSpec
{
    std::string variable; // "phi" or "Delta"
    std::optional<double> start;
    std::optional<double> stop;
    std::optional<std::size_t> points;
};

struct ScenarioConfig
{
    // Exactly one parameter source per run.
    std::optional<GeometrySpec> geometry;
    std::optional<DirectSpec> direct;

    // drive
    double Omega = 1.0;
    std::optional<double> omega0;
    std::optional<double> phi;
    std::optional<double> Delta;

    // run
    std::string model = "traveling5";
    double T = 10.0;
    std::optional<double> dt;
    bool convergence_gate = true;
    std::size_t stride = 1;
    std::optional<int> n_max;
    bool allow_small_cutoff = false;
    std::vector<double> initial;

    SweepSpec sweep;

    // output
    std::optional<std::string> out_path;
    std::string format = "csv";
    std::string units = "natural";
    std::optional<std::uint64_t> seed;

    // Negative-control hook for the consistency suite.
    double kappa_scale = 1.0;
};

// Reads the documented JSON config schema; unknown keys are rejected.
ScenarioConfig config_from_json(const nlohmann::json &doc);

// Geometry under the selected units: "natural" fixes n d / c = 1 and reads n
// only; "si" requires d, n and c.
CavityGeometry resolve_geometry(const ScenarioConfig &cfg);

// kappa, J, Omega, Delta from geometry + drive frequency or from the direct override.
TravelingWaveParams resolve_params(const ScenarioConfig &cfg);

int cmd_sweep_transmission(const ScenarioConfig &cfg, std::ostream &out, std::ostream &log);
int cmd_steady(const ScenarioConfig &cfg, std::ostream &out, std::ostream &log);
int cmd_evolve(const ScenarioConfig &cfg, std::ostream &out, std::ostream &log);
int cmd_consistency(const ScenarioConfig &cfg, std::ostream &out, std::ostream &log);

// Dispatches by subcommand name and maps exceptions to exit codes.
int run_command(const std::string &command, const ScenarioConfig &cfg, std::ostream &out,
                std::ostream &log);

} // namespace twosided::cli

#endif // TWOSIDED_CLI_HPP
