#include "d2d/protocol.hpp"

#include <array>
#include <istream>
#include <ostream>
#include <sstream>
#include <utility>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "d2d/errors.hpp"

namespace d2d {

namespace {

constexpr std::array<std::pair<SessionState, std::string_view>, 7> kStateNames{{
    {SessionState::idle, "idle"},
    {SessionState::request_sent, "request_sent"},
    {SessionState::scheduled, "scheduled"},
    {SessionState::discovery_sent, "discovery_sent"},
    {SessionState::sir_reported, "sir_reported"},
    {SessionState::established, "established"},
    {SessionState::failed_retry, "failed_retry"},
}};

}  // namespace

std::string_view to_string(SessionState state) noexcept
{
    for (auto const& [s, name] : kStateNames)
        if (s == state)
            return name;
    return "unknown";
}

std::optional<SessionState> parse_session_state(std::string_view text) noexcept
{
    for (auto const& [s, name] : kStateNames)
        if (name == text)
            return s;
    return std::nullopt;
}

bool is_valid_transition(SessionState from, SessionState to) noexcept
{
    using S = SessionState;
    switch (from)
    {
        case S::idle: return to == S::request_sent;
        case S::request_sent: return to == S::scheduled;
        case S::scheduled: return to == S::discovery_sent;
        case S::discovery_sent: return to == S::sir_reported;
        case S::sir_reported: return to == S::established || to == S::failed_retry;
        case S::failed_retry: return to == S::request_sent;
        case S::established: return false;
    }
    return false;
}

std::string_view to_string(SlotAction action) noexcept
{
    switch (action)
    {
        case SlotAction::silent: return "silent";
        case SlotAction::request: return "request";
        case SlotAction::discovery: return "discovery";
        case SlotAction::sir_report: return "sir_report";
        case SlotAction::downlink_schedule: return "downlink_schedule";
        case SlotAction::downlink_decision: return "downlink_decision";
        case SlotAction::data: return "data";
    }
    return "unknown";
}

DiscoverySession DiscoverySession::start(D2DPair const& pair)
{
    DiscoverySession s;
    s.pair = pair;
    return s;
}

bool DiscoverySession::awaits_uplink() const noexcept
{
    switch (state)
    {
        case SessionState::idle:
        case SessionState::failed_retry:
        case SessionState::scheduled:
        case SessionState::discovery_sent: return true;
        default: return false;
    }
}

PairSlotResult const* SlotOutcome::find(int pair_id) const noexcept
{
    for (auto const& p : pairs)
        if (p.pair_id == pair_id)
            return &p;
    return nullptr;
}

bool transmit_decision(int pair_id, int N, Rng& rng)
{
    if (N < 1 || pair_id < 1 || pair_id > N)
        throw ParameterError(fmt::format("pair id {} outside [1, {}]", pair_id, N));
    std::uniform_int_distribution<int> dice(1, N);
    return dice(rng) == pair_id;
}

bool detect_collision(std::span<int const> transmitting_pair_ids) noexcept
{
    return transmitting_pair_ids.size() >= 2;
}

namespace {

struct StepInput
{
    bool solo = false;
    std::optional<SirSample> sir;
    double tau_db = 0;
    bool control_ok = true;
};

void enter(DiscoverySession& s, SessionState next)
{
    s.state = next;
    s.history.push_back(next);
}

// One protocol step; returns false when the session cannot move this slot.
bool step(DiscoverySession& s, StepInput const& in)
{
    using S = SessionState;
    switch (s.state)
    {
        case S::idle:
        case S::failed_retry:
            if (!in.solo || !in.control_ok)
                return false;
            enter(s, S::request_sent);
            return true;
        case S::request_sent:
            enter(s, S::scheduled);
            return true;
        case S::scheduled:
            if (!in.solo || !in.sir)
                return false;
            s.last_sir = in.sir;
            enter(s, S::discovery_sent);
            return true;
        case S::discovery_sent:
            if (!in.solo || !in.control_ok)
                return false;
            enter(s, S::sir_reported);
            return true;
        case S::sir_reported:
            if (s.last_sir && s.last_sir->passes(in.tau_db) && in.control_ok)
            {
                enter(s, S::established);
                s.slots_to_success = s.slots_elapsed;
            }
            else
            {
                enter(s, S::failed_retry);
            }
            return true;
        case S::established:
            return false;
    }
    return false;
}

}  // namespace

DiscoverySession advance_session(DiscoverySession session,
                                 SlotOutcome const& slot,
                                 double tau_db,
                                 bool control_ok,
                                 SignalingMode mode)
{
    if (session.established())
        return session;
    ++session.slots_elapsed;

    PairSlotResult const* mine = slot.find(session.pair.id);
    bool const transmitted = mine && mine->transmitted;
    if (transmitted && slot.collision)
        return session;

    StepInput in;
    in.solo = transmitted;
    in.sir = mine ? mine->sir : std::nullopt;
    in.tau_db = tau_db;
    in.control_ok = control_ok;

    if (mode == SignalingMode::full_signaling)
    {
        step(session, in);
        return session;
    }
    while (step(session, in))
    {
        if (session.state == SessionState::established
            || session.state == SessionState::failed_retry)
            break;
    }
    return session;
}

SirSample control_link_sir(Point ue,
                           Point serving_bs,
                           std::span<Point const> interferer_txs,
                           ChannelParams const& params,
                           Rng& rng)
{
    return compute_sir(ue, serving_bs, interferer_txs, params, rng);
}

bool control_link_ok(Point ue,
                     Point serving_bs,
                     std::span<Point const> interferer_txs,
                     double tau_db,
                     ChannelParams const& params,
                     Rng& rng)
{
    return control_link_sir(ue, serving_bs, interferer_txs, params, rng).passes(tau_db);
}

namespace {

SlotAction uplink_action(SessionState state, SignalingMode mode)
{
    switch (state)
    {
        case SessionState::idle:
        case SessionState::failed_retry:
            return mode == SignalingMode::single_message ? SlotAction::discovery
                                                         : SlotAction::request;
        case SessionState::scheduled: return SlotAction::discovery;
        case SessionState::discovery_sent: return SlotAction::sir_report;
        case SessionState::established: return SlotAction::data;
        default: return SlotAction::silent;
    }
}

bool is_control_message(SlotAction action)
{
    return action == SlotAction::request || action == SlotAction::sir_report;
}

Point serving_bs(NetworkRealization const& realization, Point ue)
{
    if (realization.bs_points.empty())
        throw ParameterError("control link requested but the realization has no BS");
    return representative_cell(realization.bs_points, ue);
}

}  // namespace

SlotOutcome run_slot(NetworkRealization const& realization,
                     std::vector<DiscoverySession>& sessions,
                     SlotContext const& context,
                     int slot_index,
                     Rng& rng)
{
    SlotOutcome out;
    out.slot_index = slot_index;
    out.pairs.resize(sessions.size());

    bool const fixed = context.contention == ContentionModel::fixed_population;
    std::vector<std::size_t> contenders;
    for (std::size_t i = 0; i < sessions.size(); ++i)
    {
        auto const& s = sessions[i];
        bool const eligible = fixed ? (s.established() || s.awaits_uplink())
                                    : (!s.established() && s.awaits_uplink());
        if (eligible)
            contenders.push_back(i);
    }

    int const dice_range = static_cast<int>(fixed ? sessions.size() : contenders.size());
    for (std::size_t k = 0; k < contenders.size(); ++k)
    {
        std::size_t const i = contenders[k];
        int const rank = fixed ? static_cast<int>(i) + 1 : static_cast<int>(k) + 1;
        bool const transmit = context.decide ? context.decide(rank, dice_range, rng)
                                             : transmit_decision(rank, dice_range, rng);
        auto& r = out.pairs[i];
        r.contended = true;
        r.transmitted = transmit;
        if (transmit)
            out.transmitting_pair_ids.push_back(sessions[i].pair.id);
    }
    out.collision = detect_collision(out.transmitting_pair_ids);

    for (std::size_t i = 0; i < sessions.size(); ++i)
    {
        auto const& s = sessions[i];
        auto& r = out.pairs[i];
        r.pair_id = s.pair.id;
        if (r.transmitted)
        {
            r.action = uplink_action(s.state, context.signaling);
            r.collision = out.collision;
        }
        else if (s.state == SessionState::request_sent)
            r.action = SlotAction::downlink_schedule;
        else if (s.state == SessionState::sir_reported)
            r.action = SlotAction::downlink_decision;
    }

    if (out.transmitting_pair_ids.size() == 1)
    {
        std::size_t solo = 0;
        while (!out.pairs[solo].transmitted)
            ++solo;
        auto const& s = sessions[solo];
        auto& r = out.pairs[solo];

        Point from = s.pair.tx;
        Point to = s.pair.rx;
        if (r.action == SlotAction::request)
            to = serving_bs(realization, s.pair.tx);
        else if (r.action == SlotAction::sir_report)
        {
            from = s.pair.rx;
            to = serving_bs(realization, s.pair.rx);
        }

        std::vector<Point> interferers;
        if (context.interferers == InterfererMode::saturated)
        {
            double const link = distance(from, to);
            Window const window{to, truncation_radius(link, context.lambda_u)};
            double const inner =
                context.channel.interferer_geometry == InterfererGeometry::guard_zone ? link
                                                                                      : 0.0;
            interferers = sample_ppp_annulus(context.lambda_u, window, inner, rng);
        }
        // contention_only: a sole transmitter has no concurrent D2D interferers.

        SirSample const sir = is_control_message(r.action)
                                  ? control_link_sir(from, to, interferers, context.channel, rng)
                                  : compute_sir(from, to, interferers, context.channel, rng);
        r.sir = sir;
        r.success = sir.passes(context.tau_db);
    }

    for (std::size_t i = 0; i < sessions.size(); ++i)
    {
        auto& r = out.pairs[i];
        if (!sessions[i].established())
        {
            bool const control_ok = !is_control_message(r.action) || r.success;
            sessions[i] = advance_session(
                std::move(sessions[i]), out, context.tau_db, control_ok, context.signaling);
        }
        r.state_after = sessions[i].state;
    }
    return out;
}

void write_trace_header(std::ostream& os)
{
    os << "slot_index,pair_id,action,collision,sir_db,state_after\n";
}

void write_trace(std::ostream& os, SlotOutcome const& slot)
{
    for (auto const& r : slot.pairs)
    {
        std::string sir;
        if (r.sir)
            sir = r.sir->is_infinite() ? "inf" : fmt::format("{}", r.sir->db());
        fmt::print(os,
                   "{},{},{},{},{},{}\n",
                   slot.slot_index,
                   r.pair_id,
                   to_string(r.action),
                   slot.collision ? 1 : 0,
                   sir,
                   to_string(r.state_after));
    }
}

std::vector<TraceRow> read_trace(std::istream& is)
{
    std::vector<TraceRow> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line))
    {
        ++line_no;
        if (line_no == 1 || line.empty())
            continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ','))
            fields.push_back(field);
        if (line.back() == ',')
            fields.emplace_back();
        if (fields.size() != 6)
            throw std::runtime_error(fmt::format("trace line {}: expected 6 fields", line_no));

        TraceRow row;
        row.slot_index = std::stoi(fields[0]);
        row.pair_id = std::stoi(fields[1]);
        row.action = fields[2];
        row.collision = fields[3] == "1";
        if (!fields[4].empty())
            row.sir_db = fields[4] == "inf" ? std::numeric_limits<double>::infinity()
                                            : std::stod(fields[4]);
        auto state = parse_session_state(fields[5]);
        if (!state)
            throw std::runtime_error(
                fmt::format("trace line {}: unknown state '{}'", line_no, fields[5]));
        row.state_after = *state;
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace d2d
