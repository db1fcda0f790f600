#include "d2d/runner.hpp"

#include <chrono>
#include <fstream>
#include <ostream>
#include <sstream>
#include <system_error>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "d2d/config.hpp"
#include "d2d/errors.hpp"
#include "d2d/report.hpp"

namespace d2d {

namespace fs = std::filesystem;

namespace {

std::string_view command_name(Command c)
{
    switch (c)
    {
        case Command::analytic: return "analytic";
        case Command::simulate: return "simulate";
        case Command::compare: return "compare";
        case Command::figures: return "figures";
    }
    return "unknown";
}

EvalMode eval_mode(Command c)
{
    switch (c)
    {
        case Command::analytic: return EvalMode::analytic;
        case Command::simulate: return EvalMode::simulate;
        default: return EvalMode::compare;
    }
}

std::string read_file(fs::path const& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError(fmt::format("cannot read config file '{}'", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void apply_overrides(RunManifest const& m, std::string const& file_text, ExperimentConfig& config)
{
    if (!file_text.empty())
        apply_config(file_text, config);
    if (m.seed)
        config.seed = *m.seed;
    if (m.mode)
        set_config_value(config, "mode", *m.mode);
    if (m.interferers)
        set_config_value(config, "interferers", *m.interferers);
    if (m.shadowing)
        set_config_value(config, "shadowing", *m.shadowing);
    try
    {
        config.validate();
    }
    catch (ParameterError const& e)
    {
        throw ConfigError(fmt::format("inconsistent configuration: {}", e.what()));
    }
}

std::ofstream open_output(fs::path const& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
    return out;
}

struct Job
{
    std::string preset;
    Series series;
    fs::path dir;
};

void run_series(Job const& job, Command command, unsigned jobs, std::ostream& log)
{
    std::error_code ec;
    fs::create_directories(job.dir, ec);
    if (ec)
        throw std::runtime_error(
            fmt::format("cannot create output directory '{}': {}", job.dir.string(), ec.message()));

    auto const start = std::chrono::steady_clock::now();
    auto const records = sweep(job.series.config, eval_mode(command), jobs);
    auto const elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    {
        auto out = open_output(job.dir / "sir_ccdf.csv");
        write_sir_ccdf_csv(out, records);
    }
    {
        auto out = open_output(job.dir / "success.csv");
        write_success_csv(out, records);
    }
    {
        auto out = open_output(job.dir / "slots.csv");
        write_slots_csv(out, records);
    }
    {
        std::vector<std::pair<std::string, std::string>> meta{
            {"version", std::string(kVersion)},
            {"command", std::string(command_name(command))},
            {"preset", job.preset},
            {"series", job.series.label},
        };
        for (auto& e : config_entries(job.series.config))
            meta.push_back(std::move(e));
        auto out = open_output(job.dir / "meta.csv");
        write_meta_csv(out, meta);
    }

    std::int64_t censored = 0;
    std::int64_t skipped = 0;
    for (auto const& r : records)
    {
        censored += r.censored;
        skipped += r.skipped;
    }
    fmt::print(log,
               "{} [{}] {} points -> {} ({:.2f} s, {} censored, {} skipped trials)\n",
               job.preset,
               job.series.label,
               records.size(),
               job.dir.string(),
               elapsed,
               censored,
               skipped);
}

void write_trace_file(fs::path const& path, ExperimentConfig const& config)
{
    auto const points = config.sweep_points();
    if (points.empty())
        return;
    std::vector<SlotOutcome> slots;
    run_trial(config.at(points.front()), 0, 0, &slots);
    auto out = open_output(path);
    write_trace_header(out);
    for (auto const& s : slots)
        write_trace(out, s);
}

}  // namespace

int run_command(RunManifest const& manifest, std::ostream& log, std::ostream& err)
{
    std::vector<Job> plan;
    try
    {
        std::string const file_text = manifest.config_path ? read_file(*manifest.config_path) : "";

        std::vector<std::string> presets;
        if (manifest.command == Command::figures)
        {
            if (manifest.figures.empty())
                for (auto f : figure_names())
                    presets.emplace_back(f);
            else
                presets = manifest.figures;
            for (auto const& f : presets)
            {
                auto const names = figure_names();
                if (std::find(names.begin(), names.end(), f) == names.end())
                    throw ConfigError(fmt::format("unknown figure '{}'", f), "figures");
            }
        }
        else
        {
            presets.push_back(manifest.preset.value_or("default"));
        }

        for (auto const& name : presets)
        {
            auto series = preset(name);
            fs::path base = manifest.out_dir;
            if (manifest.command == Command::figures)
                base /= name;
            for (auto& s : series)
            {
                apply_overrides(manifest, file_text, s.config);
                fs::path dir = series.size() > 1 ? base / s.label : base;
                plan.push_back({name, std::move(s), std::move(dir)});
            }
        }
    }
    catch (ConfigError const& e)
    {
        fmt::print(err, "config error: {}\n", e.what());
        return kExitConfigError;
    }
    catch (ParameterError const& e)
    {
        fmt::print(err, "config error: {}\n", e.what());
        return kExitConfigError;
    }

    unsigned jobs = manifest.jobs;
    if (jobs == 0)
        jobs = std::max(1u, std::thread::hardware_concurrency());

    try
    {
        for (auto const& job : plan)
            run_series(job, manifest.command, jobs, log);
        if (manifest.trace_path && !plan.empty())
            write_trace_file(*manifest.trace_path, plan.front().series.config);
    }
    catch (std::exception const& e)
    {
        fmt::print(err, "error: {}\n", e.what());
        return kExitRuntimeError;
    }
    return kExitOk;
}

}  // namespace d2d
