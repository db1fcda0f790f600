#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "d2d/montecarlo.hpp"

namespace d2d {

inline constexpr std::string_view kSirCcdfHeader = "sweep_value,tau_db,empirical,analytic";
inline constexpr std::string_view kSuccessHeader =
    "sweep_value,p_success_emp,p_success_analytic,n_opportunities";
inline constexpr std::string_view kSlotsHeader =
    "sweep_value,n,cdf_emp,cdf_analytic,required_slots_analytic";
inline constexpr std::string_view kMetaHeader = "key,value";

// Values missing from a record (e.g. analytic columns under `simulate`) are
// written as empty fields.
void write_sir_ccdf_csv(std::ostream& os, std::span<MetricRecord const> records);
void write_success_csv(std::ostream& os, std::span<MetricRecord const> records);
void write_slots_csv(std::ostream& os, std::span<MetricRecord const> records);
void write_meta_csv(std::ostream& os,
                    std::span<std::pair<std::string, std::string> const> entries);

}  // namespace d2d
