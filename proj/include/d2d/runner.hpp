#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace d2d {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitRuntimeError = 3;

enum class Command
{
    analytic,  //!< closed forms only
    simulate,  //!< Monte Carlo only
    compare,   //!< both, paired columns
    figures,   //!< compare over the figure presets, one directory each
};

struct RunManifest
{
    Command command = Command::compare;
    std::optional<std::filesystem::path> config_path;
    std::filesystem::path out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<std::string> preset;
    unsigned jobs = 0;  //!< 0 = hardware concurrency
    std::optional<std::string> mode;
    std::optional<std::string> interferers;
    std::optional<std::string> shadowing;
    std::vector<std::string> figures;  //!< empty = all figure presets
    std::optional<std::filesystem::path> trace_path;
};

/*!
 * Run a manifest and write sir_ccdf.csv, success.csv, slots.csv and meta.csv.
 *
 * Configuration precedence is flag > config file > preset > defaults. Returns
 * kExitOk, kExitConfigError or kExitRuntimeError; diagnostics go to \p err.
 */
int run_command(RunManifest const& manifest, std::ostream& log, std::ostream& err);

}  // namespace d2d
