#include "d2d/montecarlo.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>
#include <utility>

#include <boost/math/distributions/chi_squared.hpp>
#include <fmt/format.h>

#include "d2d/errors.hpp"

namespace d2d {

namespace {

constexpr std::array<std::pair<SweepParam, std::string_view>, 6> kSweepNames{{
    {SweepParam::lambda_u, "lambda_u"},
    {SweepParam::N, "N"},
    {SweepParam::tau_db, "tau_db"},
    {SweepParam::R, "R"},
    {SweepParam::alpha, "alpha"},
    {SweepParam::eta, "eta"},
}};

// Snapshot draws use their own stream family so they do not depend on how
// many slots the protocol run consumed.
constexpr std::uint64_t kSnapshotStreamTag = 0x736e617073686f74ULL;

}  // namespace

std::string_view to_string(SweepParam param) noexcept
{
    for (auto const& [p, name] : kSweepNames)
        if (p == param)
            return name;
    return "unknown";
}

std::optional<SweepParam> parse_sweep_param(std::string_view text) noexcept
{
    for (auto const& [p, name] : kSweepNames)
        if (name == text)
            return p;
    return std::nullopt;
}

//---------------------------------------------------------------------------//
// ExperimentConfig
//---------------------------------------------------------------------------//

void ExperimentConfig::set_alpha(double alpha) noexcept
{
    analytic.alpha = alpha;
    channel.alpha = alpha;
}

ExperimentConfig ExperimentConfig::at(double value) const
{
    ExperimentConfig out = *this;
    switch (sweep.param)
    {
        case SweepParam::lambda_u: out.analytic.lambda_u = value; break;
        case SweepParam::N:
            if (value != std::floor(value) || value < 1 || value > 1e6)
                throw ParameterError(fmt::format("N sweep value must be a positive integer, got {}", value));
            out.analytic.N = static_cast<int>(value);
            break;
        case SweepParam::tau_db: out.analytic.tau_db = value; break;
        case SweepParam::R: out.analytic.R = value; break;
        case SweepParam::alpha: out.set_alpha(value); break;
        case SweepParam::eta: out.analytic.eta = value; break;
    }
    return out;
}

std::vector<double> ExperimentConfig::sweep_points() const
{
    if (sweep.values)
        return *sweep.values;
    switch (sweep.param)
    {
        case SweepParam::lambda_u: return {analytic.lambda_u};
        case SweepParam::N: return {static_cast<double>(analytic.N)};
        case SweepParam::tau_db: return {analytic.tau_db};
        case SweepParam::R: return {analytic.R};
        case SweepParam::alpha: return {analytic.alpha};
        case SweepParam::eta: return {analytic.eta};
    }
    return {};
}

void ExperimentConfig::validate() const
{
    analytic.validate();
    channel.validate();
    power.validate();
    if (channel.alpha != analytic.alpha)
        throw ParameterError("channel and analytic alpha disagree");
    if (!(lambda_b >= 0) || !std::isfinite(lambda_b))
        throw ParameterError(fmt::format("lambda_b must be >= 0, got {}", lambda_b));
    if (signaling == SignalingMode::full_signaling && !(lambda_b > 0))
        throw ParameterError("full_signaling needs lambda_b > 0 for the control links");
    if (trials < 1)
        throw ParameterError(fmt::format("trials must be >= 1, got {}", trials));
    if (slots_cap < 0)
        throw ParameterError(fmt::format("slots_cap must be >= 0, got {}", slots_cap));
    if (!(pair_threshold >= 0))
        throw ParameterError(fmt::format("pair_threshold must be >= 0, got {}", pair_threshold));
    if (max_resamples < 0)
        throw ParameterError(fmt::format("max_resamples must be >= 0, got {}", max_resamples));
    for (double t : tau_grid_db)
        if (!std::isfinite(t))
            throw ParameterError("tau grid values must be finite");
    if (sweep.values)
        for (double v : *sweep.values)
            at(v).analytic.validate();
}

std::int64_t effective_slots_cap(ExperimentConfig const& config)
{
    if (config.slots_cap > 0)
        return config.slots_cap;
    std::int64_t const steps = config.signaling == SignalingMode::full_signaling ? 5 : 1;
    try
    {
        std::int64_t const n = required_slots(config.analytic);
        if (n > kMaxAutoSlotsCap / (10 * steps))
            return kMaxAutoSlotsCap;
        return 10 * steps * n;
    }
    catch (UnreachableTargetError const&)
    {
        return kMaxAutoSlotsCap;
    }
}

//---------------------------------------------------------------------------//
// Trials
//---------------------------------------------------------------------------//

void SuccessTally::add(SlotOutcome const& slot) noexcept
{
    for (auto const& r : slot.pairs)
    {
        if (!r.contended)
            continue;
        ++opportunities;
        if (r.success)
            ++successes;
    }
}

void SuccessTally::merge(SuccessTally const& other) noexcept
{
    successes += other.successes;
    opportunities += other.opportunities;
}

double SuccessTally::rate() const
{
    if (opportunities == 0)
        throw std::invalid_argument("no contention opportunities observed");
    return static_cast<double>(successes) / static_cast<double>(opportunities);
}

namespace {

Point uniform_in_disc(Point center, double radius, Rng& rng)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double const r = radius * std::sqrt(unit(rng));
    double const theta = 2 * std::numbers::pi * unit(rng);
    return {center.x + r * std::cos(theta), center.y + r * std::sin(theta)};
}

NetworkRealization build_realization(ExperimentConfig const& config, Rng& rng)
{
    auto const& a = config.analytic;
    NetworkRealization real;
    real.window = Window{{0, 0}, truncation_radius(a.R, a.lambda_u)};

    if (config.signaling == SignalingMode::full_signaling)
    {
        do
            real.bs_points = sample_ppp(config.lambda_b, real.window, rng);
        while (real.bs_points.empty());
    }

    if (config.placement == Placement::paired_users)
    {
        real.ue_points = sample_ppp(a.lambda_u, real.window, rng);
        double const threshold = config.pair_threshold > 0 ? config.pair_threshold : a.R;
        real.pairs = pair_users(real.ue_points, threshold, a.N);
        return real;
    }

    // Receivers spread over a disc of the mean cell area around the origin.
    double cell_radius = config.lambda_b > 0 ? 1 / std::sqrt(std::numbers::pi * config.lambda_b)
                                             : a.R;
    cell_radius = std::min(cell_radius, real.window.radius - a.R);
    std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi);
    for (int id = 1; id <= a.N; ++id)
    {
        D2DPair pair;
        pair.id = id;
        pair.rx = uniform_in_disc({0, 0}, cell_radius, rng);
        double const theta = angle(rng);
        pair.tx = {pair.rx.x + a.R * std::cos(theta), pair.rx.y + a.R * std::sin(theta)};
        pair.separation = a.R;
        real.ue_points.push_back(pair.tx);
        real.ue_points.push_back(pair.rx);
        real.pairs.push_back(pair);
    }
    return real;
}

}  // namespace

SirSample sir_snapshot(ExperimentConfig const& config,
                       std::int64_t trial_index,
                       std::uint64_t point_index)
{
    auto const& a = config.analytic;
    Rng rng = make_stream(config.seed ^ kSnapshotStreamTag,
                          point_index,
                          static_cast<std::uint64_t>(trial_index));
    double const density =
        config.interferers == InterfererMode::saturated ? a.lambda_u : 0.0;
    Window const window{{0, 0}, truncation_radius(a.R, a.lambda_u)};
    auto const scene =
        place_fixed_pair(a.R, density, window, config.channel.interferer_geometry, rng);
    auto const& pair = scene.pairs.front();
    return compute_sir(pair.tx, pair.rx, scene.ue_points, config.channel, rng);
}

TrialRecord run_trial(ExperimentConfig const& config,
                      std::int64_t trial_index,
                      std::uint64_t point_index,
                      std::vector<SlotOutcome>* trace)
{
    TrialRecord record;
    record.trial_index = trial_index;
    Rng rng = make_stream(config.seed, point_index, static_cast<std::uint64_t>(trial_index));

    std::optional<NetworkRealization> real;
    for (int attempt = 0; attempt <= config.max_resamples && !real; ++attempt)
    {
        try
        {
            real = build_realization(config, rng);
        }
        catch (ShortfallError const&)
        {
        }
    }
    if (!real)
    {
        record.skipped = true;
        return record;
    }
    real->seed = config.seed;

    record.sir = sir_snapshot(config, trial_index, point_index);

    std::vector<DiscoverySession> sessions;
    sessions.reserve(real->pairs.size());
    for (auto const& p : real->pairs)
        sessions.push_back(DiscoverySession::start(p));

    SlotContext context;
    context.channel = config.channel;
    context.lambda_u = config.analytic.lambda_u;
    context.tau_db = config.analytic.tau_db;
    context.signaling = config.signaling;
    context.interferers = config.interferers;
    context.contention = config.contention;

    std::int64_t const cap = effective_slots_cap(config);
    auto const all_done = [&] {
        return std::all_of(sessions.begin(), sessions.end(), [](auto const& s) {
            return s.established();
        });
    };
    int slot = 0;
    while (slot < cap && !all_done())
    {
        ++slot;
        SlotOutcome outcome = run_slot(*real, sessions, context, slot, rng);
        record.tally.add(outcome);
        if (trace)
            trace->push_back(std::move(outcome));
    }
    record.slots_run = slot;
    for (auto const& s : sessions)
        record.slots_to_success.push_back(s.slots_to_success);
    return record;
}

std::vector<TrialRecord>
run_trials(ExperimentConfig const& config, unsigned jobs, std::uint64_t point_index)
{
    auto const n = static_cast<std::size_t>(config.trials);
    std::vector<TrialRecord> records(n);
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::min<std::size_t>(n, 1024))));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        constexpr std::size_t chunk = 64;
        for (;;)
        {
            std::size_t const begin = next.fetch_add(chunk);
            if (begin >= n)
                return;
            std::size_t const end = std::min(n, begin + chunk);
            try
            {
                for (std::size_t i = begin; i < end; ++i)
                    records[i] = run_trial(config, static_cast<std::int64_t>(i), point_index);
            }
            catch (...)
            {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next = n;
                return;
            }
        }
    };

    if (jobs == 1)
    {
        worker();
    }
    else
    {
        std::vector<std::jthread> pool;
        for (unsigned j = 0; j < jobs; ++j)
            pool.emplace_back(worker);
    }
    if (failure)
        std::rethrow_exception(failure);
    return records;
}

//---------------------------------------------------------------------------//
// Estimators
//---------------------------------------------------------------------------//

SirCcdf estimate_sir_ccdf(std::span<SirSample const> samples, std::span<double const> tau_grid_db)
{
    if (samples.empty())
        throw std::invalid_argument("SIR CCDF needs at least one sample");
    SirCcdf out;
    out.samples = samples.size();
    for (double tau_db : tau_grid_db)
    {
        double const tau = db_to_linear(tau_db);
        auto const hits = std::count_if(samples.begin(), samples.end(), [tau](SirSample s) {
            return s.value() >= tau;
        });
        out.tau_db.push_back(tau_db);
        out.fraction.push_back(static_cast<double>(hits) / static_cast<double>(samples.size()));
    }
    return out;
}

double estimate_p_success(std::span<SlotOutcome const> slots)
{
    SuccessTally tally;
    for (auto const& s : slots)
        tally.add(s);
    return tally.rate();
}

double EmpiricalCdf::at(double x) const noexcept
{
    auto const it = std::upper_bound(grid.begin(), grid.end(), x);
    if (it == grid.begin())
        return 0;
    return cumulative[static_cast<std::size_t>(it - grid.begin()) - 1];
}

double SlotsSummary::censored_fraction() const noexcept
{
    auto const total = uncensored + censored;
    return total ? static_cast<double>(censored) / static_cast<double>(total) : 0.0;
}

std::optional<int> SlotsSummary::min_slots_for(double eta) const noexcept
{
    for (std::size_t i = 0; i < cdf.grid.size(); ++i)
        if (cdf.cumulative[i] >= eta)
            return static_cast<int>(cdf.grid[i]);
    return std::nullopt;
}

SlotsSummary estimate_slots_cdf(std::span<std::optional<int> const> slots_to_success)
{
    SlotsSummary out;
    std::vector<int> values;
    for (auto const& v : slots_to_success)
    {
        if (v)
            values.push_back(*v);
        else
            ++out.censored;
    }
    out.uncensored = static_cast<std::int64_t>(values.size());
    if (values.empty())
        throw std::runtime_error(fmt::format(
            "slots-to-success: all {} records censored; raise slots_cap", out.censored));

    std::sort(values.begin(), values.end());
    out.max_observed = values.back();
    double sum = 0;
    for (int v : values)
        sum += v;
    out.mean = sum / static_cast<double>(values.size());

    auto const total = static_cast<double>(slots_to_success.size());
    std::size_t idx = 0;
    for (int n = 1; n <= out.max_observed; ++n)
    {
        while (idx < values.size() && values[idx] <= n)
            ++idx;
        out.cdf.grid.push_back(n);
        out.cdf.cumulative.push_back(static_cast<double>(idx) / total);
    }
    return out;
}

GofResult geometric_gof(std::span<int const> samples, double p)
{
    if (!(p > 0 && p <= 1))
        throw ParameterError(fmt::format("geometric p must lie in (0, 1], got {}", p));
    if (samples.empty())
        throw std::invalid_argument("goodness of fit needs samples");

    double const n = static_cast<double>(samples.size());
    auto const pmf = [&](int k) { return n * p * std::pow(1 - p, k - 1); };
    auto const tail = [&](int k) { return n * std::pow(1 - p, k - 1); };  // P(X >= k)

    // Singleton bins 1..K-1 and a tail bin {X >= K}.
    int K = 1;
    while (K < 500 && pmf(K) >= 5 && tail(K + 1) >= 5)
        ++K;

    std::vector<double> observed(static_cast<std::size_t>(K), 0.0);
    for (int v : samples)
    {
        if (v < 1)
            throw ParameterError(fmt::format("geometric sample {} outside support", v));
        observed[static_cast<std::size_t>(std::min(v, K) - 1)] += 1;
    }

    GofResult out;
    out.bins = K;
    for (int k = 1; k <= K; ++k)
    {
        double const expected = k < K ? pmf(k) : tail(K);
        double const diff = observed[static_cast<std::size_t>(k - 1)] - expected;
        out.statistic += diff * diff / expected;
    }
    out.dof = K - 1;
    if (out.dof < 1)
        return out;
    boost::math::chi_squared_distribution<double> dist(out.dof);
    out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
    return out;
}

//---------------------------------------------------------------------------//
// Sweeps
//---------------------------------------------------------------------------//

MetricRecord evaluate_point(ExperimentConfig const& config,
                            std::uint64_t point_index,
                            EvalMode mode,
                            unsigned jobs)
{
    config.validate();
    MetricRecord rec;
    rec.tau_grid_db = config.tau_grid_db;
    rec.slots_cap = effective_slots_cap(config);

    if (mode != EvalMode::simulate)
    {
        for (double t : config.tau_grid_db)
            rec.sir_analytic.push_back(sir_ccdf(config.analytic, t));
        rec.p_success_analytic = p_success(config.analytic);
        try
        {
            rec.required_slots_analytic = required_slots(config.analytic);
        }
        catch (UnreachableTargetError const&)
        {
        }
    }
    if (mode == EvalMode::analytic)
        return rec;

    auto const trials = run_trials(config, jobs, point_index);
    std::vector<SirSample> sirs;
    std::vector<std::optional<int>> slots;
    SuccessTally tally;
    for (auto const& t : trials)
    {
        ++rec.trials;
        if (t.skipped)
        {
            ++rec.skipped;
            continue;
        }
        if (t.sir)
            sirs.push_back(*t.sir);
        tally.merge(t.tally);
        slots.insert(slots.end(), t.slots_to_success.begin(), t.slots_to_success.end());
    }

    if (!sirs.empty())
        rec.sir_empirical = estimate_sir_ccdf(sirs, config.tau_grid_db);
    rec.opportunities = tally.opportunities;
    if (tally.opportunities > 0)
        rec.p_success_empirical = tally.rate();
    rec.pair_records = static_cast<std::int64_t>(slots.size());
    rec.censored = std::count(slots.begin(), slots.end(), std::nullopt);
    if (rec.censored < rec.pair_records)
        rec.slots = estimate_slots_cdf(slots);
    return rec;
}

std::vector<MetricRecord> sweep(ExperimentConfig const& config, EvalMode mode, unsigned jobs)
{
    config.validate();
    std::vector<MetricRecord> out;
    auto const points = config.sweep_points();
    for (std::size_t i = 0; i < points.size(); ++i)
    {
        MetricRecord rec = evaluate_point(config.at(points[i]), i, mode, jobs);
        rec.sweep_value = points[i];
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace d2d
