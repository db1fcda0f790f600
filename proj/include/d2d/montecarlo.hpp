#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "d2d/analytic.hpp"
#include "d2d/channel.hpp"
#include "d2d/protocol.hpp"

namespace d2d {

enum class Placement
{
    fixed_pair,    //!< every pair at separation exactly R
    paired_users,  //!< pairs matched from a UE PPP by distance threshold
};

enum class SweepParam
{
    lambda_u,
    N,
    tau_db,
    R,
    alpha,
    eta,
};

std::string_view to_string(SweepParam param) noexcept;
std::optional<SweepParam> parse_sweep_param(std::string_view text) noexcept;

struct SweepAxis
{
    SweepParam param = SweepParam::lambda_u;
    //! Unset: a single point at the configured value. Empty: no points.
    std::optional<std::vector<double>> values;

    friend bool operator==(SweepAxis const&, SweepAxis const&) = default;
};

inline constexpr std::int64_t kDefaultTrials = 100000;
inline constexpr std::int64_t kMaxAutoSlotsCap = 100000;
inline constexpr std::uint64_t kDefaultSeed = 42;

struct ExperimentConfig
{
    AnalyticParams analytic;
    ChannelParams channel;  //!< channel.alpha mirrors analytic.alpha
    PowerConfig power;
    double lambda_b = 0.2;
    std::int64_t trials = kDefaultTrials;
    std::int64_t slots_cap = 0;  //!< 0 selects 10 x required_slots
    SignalingMode signaling = SignalingMode::single_message;
    InterfererMode interferers = InterfererMode::saturated;
    ContentionModel contention = ContentionModel::fixed_population;
    Placement placement = Placement::fixed_pair;
    double pair_threshold = 0;  //!< 0 selects R
    int max_resamples = 20;
    std::vector<double> tau_grid_db{-20, -15, -10, -5, 0, 5, 10, 15, 20};
    SweepAxis sweep;
    std::uint64_t seed = kDefaultSeed;

    void validate() const;
    void set_alpha(double alpha) noexcept;
    //! Copy with the sweep parameter set to \p value.
    ExperimentConfig at(double value) const;
    std::vector<double> sweep_points() const;

    friend bool operator==(ExperimentConfig const&, ExperimentConfig const&) = default;
};

//! Slot budget per trial: the explicit cap, or 10 x required_slots clamped.
std::int64_t effective_slots_cap(ExperimentConfig const& config);

struct SuccessTally
{
    std::int64_t successes = 0;
    std::int64_t opportunities = 0;

    void add(SlotOutcome const& slot) noexcept;
    void merge(SuccessTally const& other) noexcept;
    double rate() const;
};

struct TrialRecord
{
    std::int64_t trial_index = 0;
    bool skipped = false;
    std::optional<SirSample> sir;  //!< one fixed-geometry snapshot of pair 1
    SuccessTally tally;
    std::vector<std::optional<int>> slots_to_success;  //!< by pair id; unset = censored
    int slots_run = 0;

    friend bool operator==(TrialRecord const& a, TrialRecord const& b)
    {
        return a.trial_index == b.trial_index && a.skipped == b.skipped && a.sir == b.sir
               && a.tally.successes == b.tally.successes
               && a.tally.opportunities == b.tally.opportunities
               && a.slots_to_success == b.slots_to_success && a.slots_run == b.slots_run;
    }
};

/*!
 * Run one randomized trial.
 *
 * The random stream is derived from (seed, point_index, trial_index) only.
 * A realization shortfall is resampled up to max_resamples times before the
 * trial is marked skipped. When \p trace is given every slot is appended.
 */
TrialRecord run_trial(ExperimentConfig const& config,
                      std::int64_t trial_index,
                      std::uint64_t point_index = 0,
                      std::vector<SlotOutcome>* trace = nullptr);

//! All trials of one configuration, in trial order, on up to \p jobs threads.
std::vector<TrialRecord>
run_trials(ExperimentConfig const& config, unsigned jobs, std::uint64_t point_index = 0);

//! One SIR draw for the fixed pair at distance R (no protocol).
SirSample sir_snapshot(ExperimentConfig const& config, std::int64_t trial_index,
                       std::uint64_t point_index = 0);

struct SirCcdf
{
    std::vector<double> tau_db;
    std::vector<double> fraction;  //!< P(SIR >= tau), non-increasing
    std::size_t samples = 0;
};

SirCcdf estimate_sir_ccdf(std::span<SirSample const> samples, std::span<double const> tau_grid_db);

double estimate_p_success(std::span<SlotOutcome const> slots);

struct EmpiricalCdf
{
    std::vector<double> grid;
    std::vector<double> cumulative;  //!< non-decreasing, ends at <= 1

    double at(double x) const noexcept;
};

struct SlotsSummary
{
    EmpiricalCdf cdf;  //!< over all records; censored mass is the shortfall from 1
    double mean = 0;   //!< over uncensored records
    std::int64_t uncensored = 0;
    std::int64_t censored = 0;
    int max_observed = 0;

    double censored_fraction() const noexcept;
    //! Smallest n whose empirical CDF reaches eta.
    std::optional<int> min_slots_for(double eta) const noexcept;
};

//! Throws std::runtime_error when every record is censored.
SlotsSummary estimate_slots_cdf(std::span<std::optional<int> const> slots_to_success);

struct GofResult
{
    double statistic = 0;
    int dof = 0;
    double p_value = 1;
    int bins = 0;

    bool rejected(double significance) const noexcept { return p_value < significance; }
};

/*!
 * Pearson chi-square test of samples (support 1, 2, ...) against
 * Geometric(p). Bins are merged from the tail until each expected count is at
 * least 5; p is given, so dof = bins - 1.
 */
GofResult geometric_gof(std::span<int const> samples, double p);

struct MetricRecord
{
    double sweep_value = 0;
    std::vector<double> tau_grid_db;
    std::optional<SirCcdf> sir_empirical;
    std::vector<double> sir_analytic;  //!< empty when not evaluated
    std::optional<double> p_success_empirical;
    std::optional<double> p_success_analytic;
    std::int64_t opportunities = 0;
    std::optional<SlotsSummary> slots;
    std::optional<std::int64_t> required_slots_analytic;
    std::int64_t slots_cap = 0;
    std::int64_t trials = 0;
    std::int64_t skipped = 0;
    std::int64_t pair_records = 0;
    std::int64_t censored = 0;
};

enum class EvalMode
{
    analytic,
    simulate,
    compare,
};

MetricRecord evaluate_point(ExperimentConfig const& point_config,
                            std::uint64_t point_index,
                            EvalMode mode,
                            unsigned jobs);

//! One record per sweep value; deterministic given the seed.
std::vector<MetricRecord>
sweep(ExperimentConfig const& config, EvalMode mode = EvalMode::compare, unsigned jobs = 1);

}  // namespace d2d
