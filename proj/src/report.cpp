#include "d2d/report.hpp"

#include <algorithm>
#include <optional>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace d2d {

namespace {

template<class T>
std::string field(std::optional<T> const& v)
{
    return v ? fmt::format("{}", *v) : std::string{};
}

std::string quoted(std::string const& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s)
    {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + '"';
}

}  // namespace

void write_sir_ccdf_csv(std::ostream& os, std::span<MetricRecord const> records)
{
    os << kSirCcdfHeader << '\n';
    for (auto const& r : records)
    {
        for (std::size_t i = 0; i < r.tau_grid_db.size(); ++i)
        {
            std::optional<double> emp;
            if (r.sir_empirical)
                emp = r.sir_empirical->fraction[i];
            std::optional<double> ana;
            if (!r.sir_analytic.empty())
                ana = r.sir_analytic[i];
            fmt::print(os, "{},{},{},{}\n", r.sweep_value, r.tau_grid_db[i], field(emp), field(ana));
        }
    }
}

void write_success_csv(std::ostream& os, std::span<MetricRecord const> records)
{
    os << kSuccessHeader << '\n';
    for (auto const& r : records)
    {
        fmt::print(os,
                   "{},{},{},{}\n",
                   r.sweep_value,
                   field(r.p_success_empirical),
                   field(r.p_success_analytic),
                   r.opportunities);
    }
}

void write_slots_csv(std::ostream& os, std::span<MetricRecord const> records)
{
    os << kSlotsHeader << '\n';
    for (auto const& r : records)
    {
        std::int64_t n_max = 0;
        if (r.slots)
            n_max = r.slots->max_observed;
        if (r.required_slots_analytic)
            n_max = std::max(n_max, 2 * *r.required_slots_analytic);
        n_max = std::min(n_max, r.slots_cap);

        for (std::int64_t n = 1; n <= n_max; ++n)
        {
            std::optional<double> emp;
            if (r.slots)
                emp = r.slots->cdf.at(static_cast<double>(n));
            std::optional<double> ana;
            if (r.p_success_analytic)
                ana = p_at_least_one(*r.p_success_analytic, n);
            fmt::print(os,
                       "{},{},{},{},{}\n",
                       r.sweep_value,
                       n,
                       field(emp),
                       field(ana),
                       field(r.required_slots_analytic));
        }
    }
}

void write_meta_csv(std::ostream& os,
                    std::span<std::pair<std::string, std::string> const> entries)
{
    os << kMetaHeader << '\n';
    for (auto const& [k, v] : entries)
        os << quoted(k) << ',' << quoted(v) << '\n';
}

}  // namespace d2d
