#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "d2d/config.hpp"
#include "d2d/report.hpp"
#include "d2d/runner.hpp"

using namespace d2d;
namespace fs = std::filesystem;

namespace {

fs::path scratch(std::string const& name)
{
    auto const dir = fs::temp_directory_path() / ("d2d_cli_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::vector<std::string> lines(fs::path const& file)
{
    std::ifstream in(file);
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line))
        out.push_back(line);
    return out;
}

std::vector<std::string> split(std::string const& line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ','))
        out.push_back(f);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

std::string slurp(fs::path const& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("parse_config: documented example")
{
    auto const c = parse_config("alpha = 4\neta = 0.9\ntau_db = 20\n");
    CHECK(c.analytic.alpha == 4);
    CHECK(c.channel.alpha == 4);
    CHECK(c.analytic.eta == 0.9);
    CHECK(c.analytic.tau_db == 20);
}

TEST_CASE("parse_config: out-of-domain value names the key and line")
{
    try
    {
        parse_config("# comment\nalpha = 1.5\n");
        FAIL("expected a config error");
    }
    catch (ConfigError const& e)
    {
        CHECK(e.key() == "alpha");
        CHECK(e.line() == 2);
        CHECK(std::string(e.what()).find("alpha") != std::string::npos);
    }
}

TEST_CASE("parse_config: empty document gives the defaults")
{
    CHECK(parse_config("") == ExperimentConfig{});
    CHECK(parse_config("\n  # nothing\n; here\n") == ExperimentConfig{});
}

TEST_CASE("parse_config: rejects unknown keys, bad lines, wrong sections")
{
    CHECK_THROWS_AS(parse_config("gamma = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("alpha 4\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("N = two\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("N = 2.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[channel]\nN = 4\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[nosuch]\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("mode = fast\n"), ConfigError);
    CHECK_NOTHROW(parse_config("[analytic]\nN = 4\n[channel]\nalpha = 3\n"));
}

TEST_CASE("parse_config: lists and optional values")
{
    auto const c = parse_config("tau_grid_db = -5, 0, 5\nsweep_param = N\nsweep_values = 2, 4\n");
    CHECK(c.tau_grid_db == std::vector<double>{-5, 0, 5});
    CHECK(c.sweep.param == SweepParam::N);
    CHECK(c.sweep.values == std::vector<double>{2, 4});
    auto const e = parse_config("sweep_values =\n");
    REQUIRE(e.sweep.values);
    CHECK(e.sweep.values->empty());
}

TEST_CASE("serialize_config: random configs round-trip")
{
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 300; ++i)
    {
        ExperimentConfig c;
        c.analytic.lambda_u = u(rng) * 0.3;
        c.analytic.N = 1 + int(u(rng) * 10);
        c.analytic.tau_db = -20 + 40 * u(rng);
        c.analytic.R = 0.1 + 50 * u(rng);
        c.set_alpha(2.05 + 6 * u(rng));
        c.analytic.eta = 0.01 + 0.98 * u(rng);
        if (i % 3 == 0)
            c.analytic.transmission_probability = u(rng);
        c.channel.shadowing_enabled = i % 2;
        c.channel.shadowing_sigma_db = 8 * u(rng);
        c.channel.interferer_geometry =
            i % 4 ? InterfererGeometry::whole_plane : InterfererGeometry::guard_zone;
        c.power.ue_tx_power_dbm = 10 + 20 * u(rng);
        c.lambda_b = 0.01 + u(rng);
        c.trials = 1 + int(u(rng) * 1e6);
        c.slots_cap = int(u(rng) * 100);
        c.signaling = i % 5 ? SignalingMode::single_message : SignalingMode::full_signaling;
        c.interferers = i % 7 ? InterfererMode::saturated : InterfererMode::contention_only;
        c.contention = i % 6 ? ContentionModel::fixed_population : ContentionModel::shrinking;
        c.placement = i % 8 ? Placement::fixed_pair : Placement::paired_users;
        c.pair_threshold = 3 * u(rng);
        c.seed = rng();
        c.tau_grid_db = {-3.25, u(rng), 17};
        c.sweep.param = static_cast<SweepParam>(i % 3);
        if (i % 2)
            c.sweep.values = std::vector<double>{1, 2, 3};
        CHECK(parse_config(serialize_config(c)) == c);
    }
}

TEST_CASE("presets: every name resolves and validates")
{
    for (auto name : preset_names())
    {
        auto const series = preset(name);
        CHECK_FALSE(series.empty());
        for (auto const& s : series)
            CHECK_NOTHROW(s.config.validate());
    }
    CHECK_THROWS_AS(preset("fig99"), ConfigError);
    CHECK(preset("fig4").size() == 4);
}

TEST_CASE("run_command: analytic N=2 without interference")
{
    auto const dir = scratch("analytic");
    std::ofstream(dir / "c.ini") << "N = 2\nlambda_u = 0\n";
    RunManifest m;
    m.command = Command::analytic;
    m.config_path = dir / "c.ini";
    m.out_dir = dir / "out";
    std::ostringstream log, err;
    REQUIRE(run_command(m, log, err) == kExitOk);

    auto const success = lines(dir / "out" / "success.csv");
    REQUIRE(success.size() == 2);
    CHECK(success[0] == kSuccessHeader);
    auto const f = split(success[1]);
    REQUIRE(f.size() == 4);
    CHECK(std::stod(f[2]) == doctest::Approx(0.25));
    CHECK(f[1].empty());

    CHECK(lines(dir / "out" / "sir_ccdf.csv").at(0) == kSirCcdfHeader);
    CHECK(lines(dir / "out" / "slots.csv").at(0) == kSlotsHeader);
    auto const meta = lines(dir / "out" / "meta.csv");
    CHECK(meta.at(0) == kMetaHeader);
    CHECK(std::find(meta.begin(), meta.end(), "command,analytic") != meta.end());
}

TEST_CASE("run_command: every preset's analytic mode is fast")
{
    auto const dir = scratch("fast");
    for (auto name : preset_names())
    {
        RunManifest m;
        m.command = Command::analytic;
        m.preset = std::string(name);
        m.out_dir = dir / std::string(name);
        std::ostringstream log, err;
        auto const start = std::chrono::steady_clock::now();
        CHECK(run_command(m, log, err) == kExitOk);
        CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(1));
    }
}

TEST_CASE("run_command: fig5 gives one slots CDF per N")
{
    auto const dir = scratch("fig5");
    std::ofstream(dir / "small.ini") << "trials = 200\n";
    RunManifest m;
    m.command = Command::figures;
    m.figures = {"fig5"};
    m.config_path = dir / "small.ini";
    m.out_dir = dir / "out";
    m.jobs = 1;
    std::ostringstream log, err;
    REQUIRE(run_command(m, log, err) == kExitOk);
    auto const rows = lines(dir / "out" / "fig5" / "slots.csv");
    std::set<double> values;
    for (std::size_t i = 1; i < rows.size(); ++i)
    {
        auto const f = split(rows[i]);
        REQUIRE(f.size() == 5);
        values.insert(std::stod(f[0]));
        CHECK_FALSE(f[2].empty());
        CHECK_FALSE(f[3].empty());
    }
    CHECK(values == std::set<double>{2, 4, 6, 8});
}

TEST_CASE("run_command: simulate leaves analytic columns empty and writes a trace")
{
    auto const dir = scratch("simulate");
    std::ofstream(dir / "c.ini") << "N = 3\nlambda_u = 0.01\ntrials = 100\n";
    RunManifest m;
    m.command = Command::simulate;
    m.config_path = dir / "c.ini";
    m.out_dir = dir / "out";
    m.trace_path = dir / "trace.csv";
    m.jobs = 1;
    std::ostringstream log, err;
    REQUIRE(run_command(m, log, err) == kExitOk);
    auto const f = split(lines(dir / "out" / "success.csv").at(1));
    REQUIRE(f.size() == 4);
    CHECK_FALSE(f[1].empty());
    CHECK(f[2].empty());
    auto const trace = lines(dir / "trace.csv");
    CHECK(trace.at(0) == "slot_index,pair_id,action,collision,sir_db,state_after");
    CHECK(trace.size() > 1);
}

TEST_CASE("run_command: compare output is byte-identical across runs and job counts")
{
    auto const dir = scratch("repeat");
    std::ofstream(dir / "c.ini") << "N = 4\nlambda_u = 0.02\ntrials = 300\nsweep_values = 0.01, 0.05\n";
    for (unsigned jobs : {1u, 3u})
    {
        RunManifest m;
        m.command = Command::compare;
        m.config_path = dir / "c.ini";
        m.out_dir = dir / ("j" + std::to_string(jobs));
        m.jobs = jobs;
        std::ostringstream log, err;
        REQUIRE(run_command(m, log, err) == kExitOk);
    }
    for (auto f : {"sir_ccdf.csv", "success.csv", "slots.csv", "meta.csv"})
        CHECK(slurp(dir / "j1" / f) == slurp(dir / "j3" / f));
}

TEST_CASE("run_command: exit codes")
{
    auto const dir = scratch("exit");
    std::ostringstream log, err;

    std::ofstream(dir / "bad.ini") << "alpha = 1.5\n";
    RunManifest bad;
    bad.config_path = dir / "bad.ini";
    bad.out_dir = dir / "out";
    CHECK(run_command(bad, log, err) == kExitConfigError);
    CHECK(err.str().find("alpha") != std::string::npos);

    RunManifest missing;
    missing.config_path = dir / "nope.ini";
    CHECK(run_command(missing, log, err) == kExitConfigError);

    RunManifest flag;
    flag.mode = "warp";
    CHECK(run_command(flag, log, err) == kExitConfigError);

    RunManifest fig;
    fig.command = Command::figures;
    fig.figures = {"fig9"};
    CHECK(run_command(fig, log, err) == kExitConfigError);

    std::ofstream(dir / "blocker") << "x";
    RunManifest blocked;
    blocked.command = Command::analytic;
    blocked.out_dir = dir / "blocker" / "sub";
    CHECK(run_command(blocked, log, err) == kExitRuntimeError);
}
