// d2dsim: closed-form evaluation and Monte Carlo simulation of network-assisted
// D2D discovery over an uplink-underlay cellular channel.

#include <iostream>

#include "CLI11.hpp"

#include "d2d/config.hpp"
#include "d2d/runner.hpp"

namespace {

void add_common_options(CLI::App& cmd, d2d::RunManifest& m)
{
    cmd.add_option("--config", m.config_path, "Key-value configuration file");
    cmd.add_option("--out", m.out_dir, "Output directory for CSV files")->capture_default_str();
    cmd.add_option("--seed", m.seed, "Master seed (overrides config)");
    cmd.add_option("--jobs", m.jobs, "Worker threads (0 = hardware concurrency)");
    cmd.add_option("--mode", m.mode, "single_message|full_signaling");
    cmd.add_option("--interferers", m.interferers, "saturated|contention_only");
    cmd.add_option("--shadowing", m.shadowing, "on|off");
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"D2D discovery: analytic evaluation and Monte Carlo simulation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(d2d::kVersion));

    d2d::RunManifest manifest;
    struct Sub
    {
        char const* name;
        char const* help;
        d2d::Command command;
    };
    Sub const subs[] = {
        {"analytic", "Closed-form sweeps only", d2d::Command::analytic},
        {"simulate", "Monte Carlo sweeps only", d2d::Command::simulate},
        {"compare", "Monte Carlo and closed form side by side", d2d::Command::compare},
    };
    for (auto const& s : subs)
    {
        auto* cmd = app.add_subcommand(s.name, s.help);
        add_common_options(*cmd, manifest);
        cmd->add_option("--preset", manifest.preset,
                        "default|table1|fig2|fig3|fig4|fig5|fig6");
        cmd->add_option("--trace", manifest.trace_path,
                        "Write the slot trace of trial 0 to this file");
        cmd->callback([&manifest, c = s.command] { manifest.command = c; });
    }
    auto* figures = app.add_subcommand("figures", "Run the fig2..fig6 presets");
    add_common_options(*figures, manifest);
    figures->add_option("ids", manifest.figures, "Figure presets to run (default: all)");
    figures->callback([&manifest] { manifest.command = d2d::Command::figures; });

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::Success const& e)
    {
        return app.exit(e);
    }
    catch (CLI::ParseError const& e)
    {
        app.exit(e);
        return d2d::kExitConfigError;
    }
    return d2d::run_command(manifest, std::cout, std::cerr);
}
