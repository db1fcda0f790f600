#include "d2d/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>

#include <fmt/format.h>

#include "d2d/errors.hpp"

namespace d2d {

ConfigError::ConfigError(std::string message, std::string key, int line)
    : std::runtime_error(std::move(message)), key_(std::move(key)), line_(line)
{
}

namespace {

std::string_view trim(std::string_view s)
{
    auto const first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    auto const last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

// Setters throw ParameterError with a bare reason; apply_config adds context.
double to_double(std::string_view v)
{
    v = trim(v);
    double out = 0;
    auto const [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty())
        throw ParameterError(fmt::format("'{}' is not a number", v));
    return out;
}

template<class Int>
Int to_integer(std::string_view v)
{
    v = trim(v);
    Int out = 0;
    auto const [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty())
        throw ParameterError(fmt::format("'{}' is not an integer", v));
    return out;
}

bool to_switch(std::string_view v)
{
    v = trim(v);
    if (v == "on" || v == "true" || v == "1")
        return true;
    if (v == "off" || v == "false" || v == "0")
        return false;
    throw ParameterError(fmt::format("'{}' is not on/off", v));
}

std::vector<double> to_list(std::string_view v)
{
    std::vector<double> out;
    v = trim(v);
    if (v.empty())
        return out;
    std::size_t start = 0;
    while (start <= v.size())
    {
        auto const comma = v.find(',', start);
        auto const end = comma == std::string_view::npos ? v.size() : comma;
        out.push_back(to_double(v.substr(start, end - start)));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return out;
}

std::string list_str(std::vector<double> const& values)
{
    return fmt::format("{}", fmt::join(values, ","));
}

double finite(double x)
{
    if (!std::isfinite(x))
        throw ParameterError("value must be finite");
    return x;
}

double positive(double x)
{
    if (!(x > 0) || !std::isfinite(x))
        throw ParameterError(fmt::format("must be positive, got {}", x));
    return x;
}

double non_negative(double x)
{
    if (!(x >= 0) || !std::isfinite(x))
        throw ParameterError(fmt::format("must be >= 0, got {}", x));
    return x;
}

template<class Enum>
struct EnumName
{
    Enum value;
    std::string_view name;
};

constexpr EnumName<SignalingMode> kModes[] = {
    {SignalingMode::single_message, "single_message"},
    {SignalingMode::full_signaling, "full_signaling"},
};
constexpr EnumName<InterfererMode> kInterferers[] = {
    {InterfererMode::saturated, "saturated"},
    {InterfererMode::contention_only, "contention_only"},
};
constexpr EnumName<ContentionModel> kContention[] = {
    {ContentionModel::fixed_population, "fixed_population"},
    {ContentionModel::shrinking, "shrinking"},
};
constexpr EnumName<Placement> kPlacement[] = {
    {Placement::fixed_pair, "fixed_pair"},
    {Placement::paired_users, "paired_users"},
};
constexpr EnumName<InterfererGeometry> kGeometry[] = {
    {InterfererGeometry::whole_plane, "whole_plane"},
    {InterfererGeometry::guard_zone, "guard_zone"},
};

template<class Enum, std::size_t M>
Enum to_enum(std::string_view v, EnumName<Enum> const (&table)[M])
{
    v = trim(v);
    for (auto const& e : table)
        if (e.name == v)
            return e.value;
    std::vector<std::string_view> names;
    for (auto const& e : table)
        names.push_back(e.name);
    throw ParameterError(fmt::format("'{}' is not one of {}", v, fmt::join(names, "|")));
}

template<class Enum, std::size_t M>
std::string enum_str(Enum value, EnumName<Enum> const (&table)[M])
{
    for (auto const& e : table)
        if (e.value == value)
            return std::string(e.name);
    return "unknown";
}

struct KeySpec
{
    std::string_view name;
    std::string_view section;
    std::function<void(ExperimentConfig&, std::string_view)> set;
    //! nullopt: omitted from serialized output.
    std::function<std::optional<std::string>(ExperimentConfig const&)> get;
};

std::string num(double x)
{
    return fmt::format("{}", x);
}

std::vector<KeySpec> const& key_table()
{
    using C = ExperimentConfig;
    using V = std::string_view;
    using O = std::optional<std::string>;
    static std::vector<KeySpec> const table{
        {"lambda_u", "analytic",
         [](C& c, V v) { c.analytic.lambda_u = non_negative(to_double(v)); },
         [](C const& c) -> O { return num(c.analytic.lambda_u); }},
        {"N", "analytic",
         [](C& c, V v) {
             int const n = to_integer<int>(v);
             if (n < 1)
                 throw ParameterError(fmt::format("must be >= 1, got {}", n));
             c.analytic.N = n;
         },
         [](C const& c) -> O { return fmt::format("{}", c.analytic.N); }},
        {"eta", "analytic",
         [](C& c, V v) {
             double const x = to_double(v);
             if (!(x > 0 && x < 1))
                 throw ParameterError(fmt::format("must lie in (0, 1), got {}", x));
             c.analytic.eta = x;
         },
         [](C const& c) -> O { return num(c.analytic.eta); }},
        {"tau_db", "analytic",
         [](C& c, V v) { c.analytic.tau_db = finite(to_double(v)); },
         [](C const& c) -> O { return num(c.analytic.tau_db); }},
        {"R", "analytic",
         [](C& c, V v) { c.analytic.R = positive(to_double(v)); },
         [](C const& c) -> O { return num(c.analytic.R); }},
        {"T_o", "analytic",
         [](C& c, V v) {
             double const x = to_double(v);
             if (!(x >= 0 && x <= 1))
                 throw ParameterError(fmt::format("must lie in [0, 1], got {}", x));
             c.analytic.transmission_probability = x;
         },
         [](C const& c) -> O {
             if (!c.analytic.transmission_probability)
                 return std::nullopt;
             return num(*c.analytic.transmission_probability);
         }},
        {"alpha", "channel",
         [](C& c, V v) {
             double const x = to_double(v);
             if (!(x > 2) || !std::isfinite(x))
                 throw ParameterError(fmt::format("must exceed 2, got {}", x));
             c.set_alpha(x);
         },
         [](C const& c) -> O { return num(c.analytic.alpha); }},
        {"shadowing", "channel",
         [](C& c, V v) { c.channel.shadowing_enabled = to_switch(v); },
         [](C const& c) -> O { return c.channel.shadowing_enabled ? "on" : "off"; }},
        {"shadowing_sigma_db", "channel",
         [](C& c, V v) { c.channel.shadowing_sigma_db = non_negative(to_double(v)); },
         [](C const& c) -> O { return num(c.channel.shadowing_sigma_db); }},
        {"interferer_geometry", "channel",
         [](C& c, V v) { c.channel.interferer_geometry = to_enum(v, kGeometry); },
         [](C const& c) -> O { return enum_str(c.channel.interferer_geometry, kGeometry); }},
        {"min_distance", "channel",
         [](C& c, V v) { c.channel.min_distance = positive(to_double(v)); },
         [](C const& c) -> O { return num(c.channel.min_distance); }},
        {"ue_tx_power_dbm", "power",
         [](C& c, V v) { c.power.ue_tx_power_dbm = finite(to_double(v)); },
         [](C const& c) -> O { return num(c.power.ue_tx_power_dbm); }},
        {"bs_tx_power_dbm", "power",
         [](C& c, V v) { c.power.bs_tx_power_dbm = finite(to_double(v)); },
         [](C const& c) -> O { return num(c.power.bs_tx_power_dbm); }},
        {"lambda_b", "network",
         [](C& c, V v) { c.lambda_b = non_negative(to_double(v)); },
         [](C const& c) -> O { return num(c.lambda_b); }},
        {"placement", "network",
         [](C& c, V v) { c.placement = to_enum(v, kPlacement); },
         [](C const& c) -> O { return enum_str(c.placement, kPlacement); }},
        {"pair_threshold", "network",
         [](C& c, V v) { c.pair_threshold = non_negative(to_double(v)); },
         [](C const& c) -> O { return num(c.pair_threshold); }},
        {"max_resamples", "network",
         [](C& c, V v) {
             int const n = to_integer<int>(v);
             if (n < 0)
                 throw ParameterError(fmt::format("must be >= 0, got {}", n));
             c.max_resamples = n;
         },
         [](C const& c) -> O { return fmt::format("{}", c.max_resamples); }},
        {"trials", "simulation",
         [](C& c, V v) {
             auto const n = to_integer<std::int64_t>(v);
             if (n < 1)
                 throw ParameterError(fmt::format("must be >= 1, got {}", n));
             c.trials = n;
         },
         [](C const& c) -> O { return fmt::format("{}", c.trials); }},
        {"slots_cap", "simulation",
         [](C& c, V v) {
             auto const n = to_integer<std::int64_t>(v);
             if (n < 0)
                 throw ParameterError(fmt::format("must be >= 0, got {}", n));
             c.slots_cap = n;
         },
         [](C const& c) -> O { return fmt::format("{}", c.slots_cap); }},
        {"mode", "simulation",
         [](C& c, V v) { c.signaling = to_enum(v, kModes); },
         [](C const& c) -> O { return enum_str(c.signaling, kModes); }},
        {"interferers", "simulation",
         [](C& c, V v) { c.interferers = to_enum(v, kInterferers); },
         [](C const& c) -> O { return enum_str(c.interferers, kInterferers); }},
        {"contention", "simulation",
         [](C& c, V v) { c.contention = to_enum(v, kContention); },
         [](C const& c) -> O { return enum_str(c.contention, kContention); }},
        {"seed", "simulation",
         [](C& c, V v) { c.seed = to_integer<std::uint64_t>(v); },
         [](C const& c) -> O { return fmt::format("{}", c.seed); }},
        {"tau_grid_db", "simulation",
         [](C& c, V v) {
             auto values = to_list(v);
             for (double x : values)
                 finite(x);
             c.tau_grid_db = std::move(values);
         },
         [](C const& c) -> O { return list_str(c.tau_grid_db); }},
        {"sweep_param", "sweep",
         [](C& c, V v) {
             auto const p = parse_sweep_param(trim(v));
             if (!p)
                 throw ParameterError(fmt::format(
                     "'{}' is not one of lambda_u|N|tau_db|R|alpha|eta", trim(v)));
             c.sweep.param = *p;
         },
         [](C const& c) -> O { return std::string(to_string(c.sweep.param)); }},
        {"sweep_values", "sweep",
         [](C& c, V v) { c.sweep.values = to_list(v); },
         [](C const& c) -> O {
             if (!c.sweep.values)
                 return std::nullopt;
             return list_str(*c.sweep.values);
         }},
    };
    return table;
}

KeySpec const* find_key(std::string_view name)
{
    for (auto const& k : key_table())
        if (k.name == name)
            return &k;
    return nullptr;
}

bool known_section(std::string_view name)
{
    for (auto const& k : key_table())
        if (k.section == name)
            return true;
    return false;
}

}  // namespace

std::vector<std::string_view> config_keys()
{
    std::vector<std::string_view> out;
    for (auto const& k : key_table())
        out.push_back(k.name);
    return out;
}

void set_config_value(ExperimentConfig& config, std::string_view key, std::string_view value)
{
    KeySpec const* spec = find_key(key);
    if (!spec)
        throw ConfigError(fmt::format("unknown key '{}'", key), std::string(key));
    try
    {
        spec->set(config, value);
    }
    catch (ParameterError const& e)
    {
        throw ConfigError(fmt::format("{}: {}", key, e.what()), std::string(key));
    }
}

void apply_config(std::string_view text, ExperimentConfig& config)
{
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size())
    {
        auto const nl = text.find('\n', pos);
        auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        if (auto const hash = line.find_first_of("#;"); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;

        if (line.front() == '[')
        {
            if (line.back() != ']')
                throw ConfigError(
                    fmt::format("line {}: malformed section header '{}'", line_no, line), {}, line_no);
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (!known_section(section))
                throw ConfigError(
                    fmt::format("line {}: unknown section [{}]", line_no, section), {}, line_no);
            continue;
        }

        auto const eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(
                fmt::format("line {}: expected 'key = value', got '{}'", line_no, line), {}, line_no);
        std::string const key(trim(line.substr(0, eq)));
        auto const value = trim(line.substr(eq + 1));

        KeySpec const* spec = find_key(key);
        if (!spec)
            throw ConfigError(fmt::format("line {}: unknown key '{}'", line_no, key), key, line_no);
        if (!section.empty() && spec->section != section)
            throw ConfigError(fmt::format("line {}: key '{}' belongs in [{}], not [{}]",
                                          line_no, key, spec->section, section),
                              key, line_no);
        try
        {
            spec->set(config, value);
        }
        catch (ParameterError const& e)
        {
            throw ConfigError(fmt::format("line {}: {}: {}", line_no, key, e.what()), key, line_no);
        }
    }

    try
    {
        config.validate();
    }
    catch (ParameterError const& e)
    {
        throw ConfigError(fmt::format("inconsistent configuration: {}", e.what()));
    }
}

ExperimentConfig parse_config(std::string_view text)
{
    ExperimentConfig config;
    apply_config(text, config);
    return config;
}

std::vector<std::pair<std::string, std::string>> config_entries(ExperimentConfig const& config)
{
    std::vector<std::pair<std::string, std::string>> out;
    for (auto const& k : key_table())
        if (auto v = k.get(config))
            out.emplace_back(std::string(k.name), std::move(*v));
    return out;
}

std::string serialize_config(ExperimentConfig const& config)
{
    std::ostringstream os;
    std::string_view section;
    for (auto const& k : key_table())
    {
        auto const v = k.get(config);
        if (!v)
            continue;
        if (k.section != section)
        {
            if (!section.empty())
                os << '\n';
            section = k.section;
            os << '[' << section << "]\n";
        }
        os << k.name << " = " << *v << '\n';
    }
    return os.str();
}

}  // namespace d2d
