#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "d2d/analytic.hpp"
#include "d2d/errors.hpp"
#include "d2d/protocol.hpp"
#include "oracles.hpp"

using namespace d2d;

namespace {

D2DPair make_pair(int id, Point tx, Point rx)
{
    return D2DPair{id, tx, rx, distance(tx, rx)};
}

SlotOutcome solo_slot(int pair_id, std::optional<SirSample> sir)
{
    SlotOutcome s;
    s.transmitting_pair_ids = {pair_id};
    PairSlotResult r;
    r.pair_id = pair_id;
    r.transmitted = true;
    r.contended = true;
    r.sir = sir;
    s.pairs.push_back(r);
    return s;
}

NetworkRealization line_realization(int pairs, bool with_bs)
{
    NetworkRealization net;
    net.window = Window{{0, 0}, 100};
    for (int k = 0; k < pairs; ++k)
    {
        net.pairs.push_back(make_pair(k + 1, {10.0 * k, 1}, {10.0 * k, 0}));
        if (with_bs)
            net.bs_points.push_back({10.0 * k + 1, 2});
    }
    return net;
}

std::vector<DiscoverySession> start_all(NetworkRealization const& net)
{
    std::vector<DiscoverySession> out;
    for (auto const& p : net.pairs)
        out.push_back(DiscoverySession::start(p));
    return out;
}

}  // namespace

TEST_CASE("transmit_decision: examples")
{
    Rng rng(1);
    for (int i = 0; i < 1000; ++i)
        REQUIRE(transmit_decision(1, 1, rng));
    CHECK_THROWS_AS(transmit_decision(3, 2, rng), ParameterError);
    CHECK_THROWS_AS(transmit_decision(1, 0, rng), ParameterError);
}

TEST_CASE("transmit_decision: frequency is 1/N")
{
    Rng rng(2);
    int const n = 1000000;
    int hits = 0;
    for (int i = 0; i < n; ++i)
        hits += transmit_decision(2, 4, rng);
    CHECK(std::abs(double(hits) / n - 0.25) < 0.0015);
}

TEST_CASE("transmit_decision: two pairs are independent")
{
    Rng rng(3);
    int const n = 1000000;
    int both = 0;
    for (int i = 0; i < n; ++i)
    {
        bool const a = transmit_decision(1, 8, rng);
        bool const b = transmit_decision(2, 8, rng);
        both += a && b;
    }
    double const p = 1.0 / 64;
    CHECK(std::abs(double(both) / n - p) < 3 * oracle::binomial_se(p, n));
}

TEST_CASE("detect_collision: examples")
{
    std::vector<int> none, one{1}, two{1, 2}, three{1, 3, 4};
    CHECK_FALSE(detect_collision(none));
    CHECK_FALSE(detect_collision(one));
    CHECK(detect_collision(two));
    CHECK(detect_collision(three));
}

TEST_CASE("state names round-trip and the transition table is closed")
{
    using S = SessionState;
    for (auto s : {S::idle, S::request_sent, S::scheduled, S::discovery_sent, S::sir_reported,
                   S::established, S::failed_retry})
        CHECK(parse_session_state(to_string(s)) == s);
    CHECK_FALSE(parse_session_state("bogus"));
    CHECK(is_valid_transition(S::idle, S::request_sent));
    CHECK(is_valid_transition(S::sir_reported, S::established));
    CHECK(is_valid_transition(S::sir_reported, S::failed_retry));
    CHECK(is_valid_transition(S::failed_retry, S::request_sent));
    CHECK_FALSE(is_valid_transition(S::idle, S::established));
    CHECK_FALSE(is_valid_transition(S::established, S::idle));
    CHECK_FALSE(is_valid_transition(S::scheduled, S::request_sent));
}

TEST_CASE("advance_session: solo passing transmission establishes in one slot")
{
    auto s = DiscoverySession::start(make_pair(1, {1, 0}, {0, 0}));
    auto const next = advance_session(s, solo_slot(1, SirSample(10.0)), 5.0, true);
    CHECK(next.state == SessionState::established);
    CHECK(next.slots_to_success == 1);
    CHECK(next.slots_elapsed == 1);
    CHECK(next.history.front() == SessionState::idle);
    CHECK(next.history.back() == SessionState::established);
    CHECK(next.history.size() == 6);
}

TEST_CASE("advance_session: failing SIR ends in failed_retry")
{
    auto s = DiscoverySession::start(make_pair(1, {1, 0}, {0, 0}));
    auto const next = advance_session(s, solo_slot(1, SirSample(1.0)), 5.0, true);
    CHECK(next.state == SessionState::failed_retry);
    CHECK_FALSE(next.slots_to_success);

    auto const again = advance_session(next, solo_slot(1, SirSample::infinite()), 5.0, true);
    CHECK(again.state == SessionState::established);
    CHECK(again.slots_to_success == 2);
}

TEST_CASE("advance_session: collision leaves the state unchanged")
{
    auto s = DiscoverySession::start(make_pair(1, {1, 0}, {0, 0}));
    SlotOutcome slot;
    slot.transmitting_pair_ids = {1, 2};
    slot.collision = true;
    PairSlotResult a;
    a.pair_id = 1;
    a.transmitted = true;
    a.collision = true;
    PairSlotResult b = a;
    b.pair_id = 2;
    slot.pairs = {a, b};
    auto const next = advance_session(s, slot, 0, true);
    CHECK(next.state == SessionState::idle);
    CHECK(next.slots_elapsed == 1);
}

TEST_CASE("advance_session: silent slot and established session")
{
    auto s = DiscoverySession::start(make_pair(1, {1, 0}, {0, 0}));
    SlotOutcome empty;
    PairSlotResult r;
    r.pair_id = 1;
    empty.pairs.push_back(r);
    CHECK(advance_session(s, empty, 0, true).state == SessionState::idle);

    auto done = advance_session(s, solo_slot(1, SirSample::infinite()), 0, true);
    REQUIRE(done.established());
    auto const after = advance_session(done, solo_slot(1, SirSample(0.001)), 0, true);
    CHECK(after.state == SessionState::established);
    CHECK(after.slots_elapsed == done.slots_elapsed);
}

TEST_CASE("advance_session: full signaling takes one step per slot")
{
    auto s = DiscoverySession::start(make_pair(1, {1, 0}, {0, 0}));
    auto const mode = SignalingMode::full_signaling;
    s = advance_session(s, solo_slot(1, std::nullopt), 0, true, mode);
    CHECK(s.state == SessionState::request_sent);
    s = advance_session(s, SlotOutcome{}, 0, true, mode);
    CHECK(s.state == SessionState::scheduled);
    s = advance_session(s, solo_slot(1, SirSample(2.0)), 0, true, mode);
    CHECK(s.state == SessionState::discovery_sent);
    s = advance_session(s, solo_slot(1, std::nullopt), 0, false, mode);
    CHECK(s.state == SessionState::discovery_sent);
    s = advance_session(s, solo_slot(1, std::nullopt), 0, true, mode);
    CHECK(s.state == SessionState::sir_reported);
    s = advance_session(s, SlotOutcome{}, 0, true, mode);
    CHECK(s.state == SessionState::established);
    CHECK(s.slots_to_success == 6);
}

TEST_CASE("control_link_ok: examples")
{
    Rng rng(1);
    ChannelParams params;
    CHECK(control_link_ok({0, 0}, {100, 0}, {}, 30, params, rng));
    std::vector<Point> const on_bs{{100, 0}};
    CHECK_THROWS_AS(control_link_ok({0, 0}, {100, 0}, on_bs, 0, params, rng), SingularityError);
}

TEST_CASE("control_link_ok: equals compute_sir passes tau over the same stream")
{
    ChannelParams params;
    std::vector<Point> const intf{{5, 5}, {-3, 8}, {12, -1}};
    for (std::uint64_t seed = 0; seed < 2000; ++seed)
    {
        Rng a(seed), b(seed);
        bool const ok = control_link_ok({0, 0}, {4, 0}, intf, 0, params, a);
        CHECK(ok == compute_sir({0, 0}, {4, 0}, intf, params, b).passes(0));
    }
}

TEST_CASE("run_slot: single pair without interferers establishes in slot 1")
{
    auto const net = line_realization(1, false);
    auto sessions = start_all(net);
    SlotContext ctx;
    ctx.lambda_u = 0;
    Rng rng(1);
    auto const out = run_slot(net, sessions, ctx, 1, rng);
    CHECK(out.transmitting_pair_ids == std::vector<int>{1});
    CHECK_FALSE(out.collision);
    REQUIRE(out.pairs.size() == 1);
    CHECK(out.pairs[0].sir->is_infinite());
    CHECK(out.pairs[0].success);
    CHECK(out.pairs[0].action == SlotAction::discovery);
    CHECK(sessions[0].slots_to_success == 1);
}

TEST_CASE("run_slot: forced simultaneous transmission collides")
{
    auto const net = line_realization(2, false);
    auto sessions = start_all(net);
    SlotContext ctx;
    ctx.decide = [](int, int, Rng&) { return true; };
    Rng rng(1);
    for (int slot = 1; slot <= 5; ++slot)
    {
        auto const out = run_slot(net, sessions, ctx, slot, rng);
        CHECK(out.collision);
        CHECK(out.transmitting_pair_ids.size() == 2);
        for (auto const& r : out.pairs)
        {
            CHECK(r.collision);
            CHECK_FALSE(r.sir);
            CHECK_FALSE(r.success);
        }
    }
    for (auto const& s : sessions)
    {
        CHECK(s.state == SessionState::idle);
        CHECK(s.slots_elapsed == 5);
    }
}

TEST_CASE("run_slot: full signaling walks five slots for a lone pair")
{
    auto const net = line_realization(1, true);
    auto sessions = start_all(net);
    SlotContext ctx;
    ctx.signaling = SignalingMode::full_signaling;
    ctx.lambda_u = 0;
    Rng rng(9);
    std::vector<SlotAction> actions;
    for (int slot = 1; slot <= 5; ++slot)
        actions.push_back(run_slot(net, sessions, ctx, slot, rng).pairs[0].action);
    CHECK(actions
          == std::vector<SlotAction>{SlotAction::request, SlotAction::downlink_schedule,
                                     SlotAction::discovery, SlotAction::sir_report,
                                     SlotAction::downlink_decision});
    CHECK(sessions[0].slots_to_success == 5);
}

TEST_CASE("run_slot: sole-transmitter frequency for N=4 is N p_nc_star")
{
    auto const net = line_realization(4, false);
    SlotContext ctx;
    ctx.lambda_u = 0;
    Rng rng(4);
    int const n = 100000;
    int solo = 0;
    for (int slot = 0; slot < n; ++slot)
    {
        auto sessions = start_all(net);
        solo += run_slot(net, sessions, ctx, 1, rng).transmitting_pair_ids.size() == 1;
    }
    CHECK(std::abs(double(solo) / n - 4 * p_nc_star(4)) < 0.005);
}

TEST_CASE("run_slot: established pairs keep contending under the fixed population")
{
    auto const net = line_realization(2, false);
    auto sessions = start_all(net);
    sessions[0] = advance_session(sessions[0], solo_slot(1, SirSample::infinite()), 0, true);
    REQUIRE(sessions[0].established());

    SlotContext ctx;
    std::vector<int> seen_range;
    ctx.decide = [&](int rank, int range, Rng&) {
        seen_range.push_back(range);
        return rank == 1;
    };
    Rng rng(1);
    auto const out = run_slot(net, sessions, ctx, 2, rng);
    CHECK(seen_range == std::vector<int>{2, 2});
    CHECK(out.pairs[0].action == SlotAction::data);
    CHECK(sessions[1].state == SessionState::idle);

    ctx.contention = ContentionModel::shrinking;
    seen_range.clear();
    auto const shrunk = run_slot(net, sessions, ctx, 3, rng);
    CHECK(seen_range == std::vector<int>{1});
    CHECK(shrunk.transmitting_pair_ids == std::vector<int>{2});
    CHECK(sessions[1].established());
}

TEST_CASE("run_slot: random runs follow valid transitions to completion")
{
    Rng rng(77);
    for (int run = 0; run < 1000; ++run)
    {
        int const pairs = 1 + run % 4;
        auto const net = line_realization(pairs, true);
        auto sessions = start_all(net);
        SlotContext ctx;
        ctx.lambda_u = 0.001;
        ctx.tau_db = 0;
        ctx.signaling = run % 2 ? SignalingMode::full_signaling : SignalingMode::single_message;
        int slot = 1;
        std::vector<int> last_elapsed(pairs, 0);
        bool all = false;
        while (!all && slot < 2000)
        {
            run_slot(net, sessions, ctx, slot++, rng);
            all = true;
            for (int k = 0; k < pairs; ++k)
            {
                REQUIRE(sessions[k].slots_elapsed >= last_elapsed[k]);
                last_elapsed[k] = sessions[k].slots_elapsed;
                all &= sessions[k].established();
            }
        }
        REQUIRE(all);
        for (auto const& s : sessions)
        {
            REQUIRE(s.history.front() == SessionState::idle);
            for (std::size_t i = 1; i < s.history.size(); ++i)
                REQUIRE(is_valid_transition(s.history[i - 1], s.history[i]));
            REQUIRE(s.slots_to_success >= 1);
        }
    }
}

TEST_CASE("trace: write and read round-trip")
{
    auto const net = line_realization(3, false);
    auto sessions = start_all(net);
    SlotContext ctx;
    ctx.lambda_u = 0.05;
    Rng rng(5);
    std::vector<SlotOutcome> slots;
    for (int slot = 1; slot <= 30; ++slot)
        slots.push_back(run_slot(net, sessions, ctx, slot, rng));

    std::stringstream ss;
    write_trace_header(ss);
    for (auto const& s : slots)
        write_trace(ss, s);
    CHECK(ss.str().rfind("slot_index,pair_id,action,collision,sir_db,state_after\n", 0) == 0);

    auto const rows = read_trace(ss);
    REQUIRE(rows.size() == 90);
    std::size_t k = 0;
    for (auto const& s : slots)
        for (auto const& r : s.pairs)
        {
            auto const& row = rows[k++];
            CHECK(row.slot_index == s.slot_index);
            CHECK(row.pair_id == r.pair_id);
            CHECK(row.action == to_string(r.action));
            CHECK(row.collision == s.collision);
            CHECK(row.state_after == r.state_after);
            CHECK(row.sir_db.has_value() == r.sir.has_value());
            if (r.sir)
                CHECK(*row.sir_db == doctest::Approx(r.sir->db()).epsilon(1e-12));
        }

    // Replay: each pair's states follow valid transitions.
    std::vector<SessionState> last(3, SessionState::idle);
    for (auto const& row : rows)
    {
        auto& prev = last[row.pair_id - 1];
        if (row.state_after != prev)
            CHECK((is_valid_transition(prev, row.state_after)
                   || row.state_after == SessionState::established
                   || row.state_after == SessionState::failed_retry));
        prev = row.state_after;
    }
}
