#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "d2d/montecarlo.hpp"

namespace d2d {

inline constexpr std::string_view kVersion = "1.0.0";

class ConfigError : public std::runtime_error
{
  public:
    ConfigError(std::string message, std::string key = {}, int line = 0);

    std::string const& key() const noexcept { return key_; }
    int line() const noexcept { return line_; }

  private:
    std::string key_;
    int line_;
};

/*!
 * Apply a key-value document onto \p config.
 *
 * Format: `key = value` lines, optional `[section]` headers, `#` or `;`
 * comments. A key under a section header must belong to that section; keys
 * before the first header may be any known key. Lists are comma-separated.
 * Unknown keys, malformed lines and out-of-domain values raise ConfigError
 * carrying the key and the 1-based line number.
 */
void apply_config(std::string_view text, ExperimentConfig& config);

//! Defaults overlaid with \p text.
ExperimentConfig parse_config(std::string_view text);

//! Set a single key (used for command-line overrides).
void set_config_value(ExperimentConfig& config, std::string_view key, std::string_view value);

//! Every key with its current value, in canonical order.
std::vector<std::pair<std::string, std::string>> config_entries(ExperimentConfig const& config);

//! Sectioned document that parse_config maps back to an equal config.
std::string serialize_config(ExperimentConfig const& config);

//! Names of all recognised keys.
std::vector<std::string_view> config_keys();

struct Series
{
    std::string label;
    ExperimentConfig config;
};

std::vector<std::string_view> preset_names();
std::vector<std::string_view> figure_names();

//! Configurations behind a named preset; multi-curve figures give one series per curve.
std::vector<Series> preset(std::string_view name);

}  // namespace d2d
