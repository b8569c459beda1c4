#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "twosided/cli.hpp"

using namespace twosided::cli;
using nlohmann::json;

namespace {

struct Run
{
    int code;
    std::string out;
    std::string log;
};

Run run(const std::string &command, const ScenarioConfig &cfg)
{
    std::ostringstream out, log;
    const int code = run_command(command, cfg, out, log);
    return {code, out.str(), log.str()};
}

std::vector<std::vector<double>> parse_csv(const std::string &text, std::vector<std::string> &header)
{
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    header.clear();
    std::stringstream hs(line);
    for (std::string cell; std::getline(hs, cell, ',');)
        header.push_back(cell);
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::stringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');)
            row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

ScenarioConfig direct(double kappa, double J, double Omega)
{
    ScenarioConfig cfg;
    cfg.direct = DirectSpec{kappa, J};
    cfg.Omega = Omega;
    return cfg;
}

ScenarioConfig geometry(double n)
{
    ScenarioConfig cfg;
    cfg.geometry = GeometrySpec{std::nullopt, n, std::nullopt};
    return cfg;
}

int shell(const std::string &cmd)
{
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path &p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const std::string binary = TWOSIDED_CLI_BINARY;

} // namespace

TEST_CASE("config: parses the documented schema")
{
    const json doc = json::parse(R"({
        "geometry": {"n": 3},
        "drive": {"Omega": 0.5, "phi": 1.0},
        "run": {"model": "lindblad", "T": 2, "dt": 0.005, "gate": false, "stride": 4,
                "n_max": 6, "allow_small_cutoff": true, "initial": [1, 0]},
        "sweep": {"variable": "phi", "start": 0, "stop": 3, "points": 7},
        "output": {"path": "x.csv", "format": "json"},
        "units": "natural",
        "seed": 5
    })");
    const ScenarioConfig cfg = config_from_json(doc);
    REQUIRE(cfg.geometry);
    CHECK(*cfg.geometry->n == 3.0);
    CHECK(cfg.Omega == 0.5);
    CHECK(*cfg.phi == 1.0);
    CHECK(cfg.model == "lindblad");
    CHECK(cfg.T == 2.0);
    CHECK(*cfg.dt == 0.005);
    CHECK_FALSE(cfg.convergence_gate);
    CHECK(cfg.stride == 4);
    CHECK(*cfg.n_max == 6);
    CHECK(cfg.allow_small_cutoff);
    CHECK(cfg.initial == std::vector<double>{1.0, 0.0});
    CHECK(*cfg.sweep.points == 7);
    CHECK(*cfg.out_path == "x.csv");
    CHECK(cfg.format == "json");
    CHECK(*cfg.seed == 5);
}

TEST_CASE("config: unknown keys and bad types are usage errors")
{
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"geometri": {}})")), usage_error);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"run": {"TT": 1}})")), usage_error);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"run": {"T": "long"}})")), usage_error);
}

TEST_CASE("parameters: exactly one source")
{
    ScenarioConfig none;
    CHECK_THROWS_AS(resolve_params(none), usage_error);
    ScenarioConfig both = direct(1.0, 0.0, 1.0);
    both.geometry = GeometrySpec{std::nullopt, 3.0, std::nullopt};
    CHECK_THROWS_AS(resolve_params(both), usage_error);
    CHECK(run("steady", both).code == exit_usage);
}

TEST_CASE("parameters: units")
{
    ScenarioConfig si = geometry(3.0);
    si.units = "si";
    CHECK_THROWS_AS(resolve_geometry(si), usage_error);
    si.geometry->d = 2.0;
    si.geometry->c = 3.0;
    CHECK(resolve_geometry(si).transit_time() == doctest::Approx(2.0));

    ScenarioConfig natural = geometry(3.0);
    natural.geometry->d = 2.0;
    CHECK_THROWS_AS(resolve_geometry(natural), usage_error);
    CHECK(resolve_geometry(geometry(3.0)).transit_time() == 1.0);
}

TEST_CASE("parameters: geometry-derived at phi = pi/2")
{
    ScenarioConfig cfg = geometry(3.0);
    cfg.phi = std::numbers::pi / 2;
    const twosided::TravelingWaveParams p = resolve_params(cfg);
    CHECK(p.kappa == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-15));
    CHECK(std::abs(p.coupling_J + 1.848392) < 1e-6);

    ScenarioConfig driveless = geometry(3.0);
    CHECK_THROWS_AS(resolve_params(driveless), usage_error);
}

TEST_CASE("sweep-transmission: n = 3 curve")
{
    const Run r = run("sweep-transmission", geometry(3.0));
    REQUIRE(r.code == exit_ok);
    std::vector<std::string> header;
    const auto rows = parse_csv(r.out, header);
    CHECK(header == std::vector<std::string>{"phi", "R_cav", "T_cav", "ratio_L", "ratio_R"});
    REQUIRE(rows.size() == 1000);
    CHECK(rows.front()[0] == 0.0);
    CHECK(rows.back()[0] == 2.0 * std::numbers::pi);
    double t_min = 1.0;
    for (const auto &row : rows) {
        CHECK(std::abs(row[1] + row[2] - 1.0) < 1e-12);
        CHECK(std::abs(row[3] - row[1]) < 1e-12);
        CHECK(std::abs(row[4] - row[2]) < 1e-12);
        t_min = std::min(t_min, row[2]);
    }
    CHECK(rows.back()[2] == 1.0);
    CHECK(t_min >= 0.36 - 1e-12);
    CHECK(t_min < 0.3601);
}

TEST_CASE("sweep-transmission: usage errors")
{
    CHECK(run("sweep-transmission", direct(1.0, 0.0, 1.0)).code == exit_usage);
    ScenarioConfig backwards = geometry(3.0);
    backwards.sweep.start = 2.0;
    backwards.sweep.stop = 1.0;
    CHECK(run("sweep-transmission", backwards).code == exit_usage);
    ScenarioConfig fmt = geometry(3.0);
    fmt.format = "xml";
    CHECK(run("sweep-transmission", fmt).code == exit_usage);
    CHECK(run("no-such-command", geometry(3.0)).code == exit_usage);
}

TEST_CASE("steady: resonant and coupled cases, JSON and text")
{
    ScenarioConfig cfg = direct(1.0, 0.0, 1.0);
    cfg.format = "json";
    Run r = run("steady", cfg);
    REQUIRE(r.code == exit_ok);
    json doc = json::parse(r.out);
    CHECK(doc.at("I_R").get<double>() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(doc.at("I_L").get<double>() == 0.0);
    CHECK(r.log.find("I_tot") != std::string::npos);

    cfg = direct(1.0, 1.0, 1.0);
    cfg.format = "json";
    doc = json::parse(run("steady", cfg).out);
    CHECK(doc.at("I_L").get<double>() == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(doc.at("I_R").get<double>() == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(doc.at("I_tot").get<double>() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(doc.at("n_L").get<double>() == doctest::Approx(0.25).epsilon(1e-15));

    cfg.format = "csv";
    r = run("steady", cfg);
    CHECK(r.out.find("n_L") != std::string::npos);
    CHECK(json::parse(r.log).at("I_tot").get<double>() == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("steady: no damping is a numerical failure")
{
    const Run r = run("steady", direct(0.0, 1.0, 1.0));
    CHECK(r.code == exit_numerical);
    CHECK(r.log.find("no stationary state") != std::string::npos);
}

TEST_CASE("steady: Delta sweep is Lorentzian with half maximum at kappa/2")
{
    ScenarioConfig cfg = direct(1.0, 0.0, 1.0);
    cfg.sweep.variable = "Delta";
    cfg.sweep.start = -1.0;
    cfg.sweep.stop = 1.0;
    cfg.sweep.points = 401;
    const Run r = run("steady", cfg);
    REQUIRE(r.code == exit_ok);
    std::vector<std::string> header;
    const auto rows = parse_csv(r.out, header);
    CHECK(header == std::vector<std::string>{"Delta", "n_L", "n_R", "I_L", "I_R", "I_tot", "I_lorentzian"});
    REQUIRE(rows.size() == 401);
    for (const auto &row : rows) {
        const double D = row[0];
        CHECK(std::abs(row[5] - 1.0 / (4.0 * D * D + 1.0)) < 1e-12);
        CHECK(std::abs(row[5] - row[6]) < 1e-12);
    }
    // grid points 100 and 300 sit at Delta = -0.5 and +0.5
    CHECK(rows[100][0] == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(std::abs(rows[100][5] - 0.5) < 1e-12);
    CHECK(std::abs(rows[300][5] - 0.5) < 1e-12);
    CHECK(rows[200][5] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("evolve: undriven traveling decay and initial row")
{
    ScenarioConfig cfg = direct(1.0, 0.3, 0.0);
    cfg.initial = {1.0, 1.0};
    cfg.T = 3.0;
    const Run r = run("evolve", cfg);
    REQUIRE(r.code == exit_ok);
    std::vector<std::string> header;
    const auto rows = parse_csv(r.out, header);
    CHECK(header == std::vector<std::string>{"t", "n_L", "n_R", "k1", "k2", "k3", "I_L", "I_R", "I_tot"});
    CHECK(rows.front() == std::vector<double>{0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 2.0});
    for (const auto &row : rows)
        CHECK(std::abs(row[1] + row[2] - 2.0 * std::exp(-row[0])) < 1e-9);
}

TEST_CASE("evolve: single-mode models use the n_R column")
{
    for (const char *model : {"single_mode", "reduced_total"}) {
        ScenarioConfig cfg = direct(1.0, 0.0, 1.0);
        cfg.model = model;
        cfg.Delta = 0.5;
        cfg.T = 30.0;
        cfg.stride = 100;
        const Run r = run("evolve", cfg);
        REQUIRE(r.code == exit_ok);
        std::vector<std::string> header;
        const auto rows = parse_csv(r.out, header);
        const auto &last = rows.back();
        CHECK(last[1] == 0.0);
        CHECK(last[2] == doctest::Approx(0.5).epsilon(1e-6));
        CHECK(last[8] == last[7]);
    }
}

TEST_CASE("evolve: lindblad agrees with traveling5 at weak drive")
{
    ScenarioConfig cfg = direct(1.0, 1.0, 0.2);
    cfg.T = 10.0;
    cfg.dt = 0.01;
    cfg.convergence_gate = false;
    cfg.stride = 10;
    const Run tw = run("evolve", cfg);
    cfg.model = "lindblad";
    cfg.n_max = 5;
    cfg.allow_small_cutoff = true;
    const Run lb = run("evolve", cfg);
    REQUIRE(tw.code == exit_ok);
    REQUIRE(lb.code == exit_ok);
    CHECK(lb.log.find("warning") != std::string::npos);
    std::vector<std::string> h;
    const auto a = parse_csv(tw.out, h);
    const auto b = parse_csv(lb.out, h);
    REQUIRE(a.size() == b.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = 0; k < a[i].size(); ++k)
            worst = std::max(worst, std::abs(a[i][k] - b[i][k]));
    CHECK(worst < 1e-5);
}

TEST_CASE("evolve: lindblad cutoff heuristic and initial state checks")
{
    ScenarioConfig cfg = direct(1.0, 0.0, 0.2);
    cfg.model = "lindblad";
    cfg.n_max = 3;
    const Run refused = run("evolve", cfg);
    CHECK(refused.code == exit_usage);
    CHECK(refused.out.empty());
    CHECK(refused.log.find("warning") != std::string::npos);

    cfg.allow_small_cutoff = true;
    cfg.initial = {0.5};
    CHECK(run("evolve", cfg).code == exit_usage);
    cfg.initial = {0, 0, 1};
    CHECK(run("evolve", cfg).code == exit_usage);

    ScenarioConfig unknown = direct(1.0, 0.0, 1.0);
    unknown.model = "classical";
    CHECK(run("evolve", unknown).code == exit_usage);
}

TEST_CASE("consistency: pass, fault injection, report")
{
    ScenarioConfig cfg;
    const Run ok = run("consistency", cfg);
    CHECK(ok.code == exit_ok);
    CHECK(json::parse(ok.out).at("all_pass") == true);

    cfg.kappa_scale = 1.01;
    const Run bad = run("consistency", cfg);
    CHECK(bad.code == exit_consistency);
    const json doc = json::parse(bad.out);
    CHECK(doc.at("all_pass") == false);
    bool ratio_failed = false;
    for (const auto &c : doc.at("checks"))
        if (c.at("name").get<std::string>().rfind("ratio_identity", 0) == 0 && !c.at("pass").get<bool>())
            ratio_failed = c.at("max_dev").get<double>() > 1e-4;
    CHECK(ratio_failed);
}

TEST_CASE("binary: exit codes, flags override config, byte-identical output")
{
    const std::filesystem::path dir = std::filesystem::temp_directory_path() / "twosided_cli_test";
    std::filesystem::create_directories(dir);
    const std::string quiet = " 2>/dev/null";

    CHECK(shell(binary + " steady --kappa 1 --J 1 --Omega 1 --out " + (dir / "s.txt").string() + quiet) == 0);
    CHECK(shell(binary + " steady --kappa 0 --J 1" + quiet + " >/dev/null") == 2);
    CHECK(shell(binary + " steady" + quiet + " >/dev/null") == 1);
    CHECK(shell(binary + " steady --kappa 1 --n 3" + quiet + " >/dev/null") == 1);
    CHECK(shell(binary + " bogus" + quiet + " >/dev/null") == 1);
    CHECK(shell(binary + " consistency --inject-kappa-scale 1.01" + quiet + " >/dev/null") == 3);
    CHECK(shell(binary + " consistency --seed 3" + quiet + " >/dev/null") == 0);

    {
        std::ofstream cfg(dir / "cfg.json");
        cfg << R"({"geometry": {"n": 20}, "sweep": {"points": 50}})";
    }
    const std::string sweep = binary + " sweep-transmission --config " + (dir / "cfg.json").string();
    REQUIRE(shell(sweep + " --out " + (dir / "a.csv").string() + quiet) == 0);
    REQUIRE(shell(sweep + " --out " + (dir / "b.csv").string() + quiet) == 0);
    const std::string a = slurp(dir / "a.csv");
    CHECK(a == slurp(dir / "b.csv"));
    CHECK(std::count(a.begin(), a.end(), '\n') == 51);
    CHECK(a.find('\r') == std::string::npos);

    // --n on the command line replaces n = 20 from the file
    REQUIRE(shell(sweep + " --n 3 --points 5 --out " + (dir / "c.csv").string() + quiet) == 0);
    const std::string c = slurp(dir / "c.csv");
    CHECK(c.find("0.35999999999999999") != std::string::npos);

    {
        std::ofstream bad(dir / "bad.json");
        bad << R"({"geometry": {"n": 3}, "colour": 1})";
    }
    CHECK(shell(binary + " sweep-transmission --config " + (dir / "bad.json").string() + quiet + " >/dev/null") == 1);

    std::filesystem::remove_all(dir);
}
