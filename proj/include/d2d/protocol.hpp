#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "d2d/channel.hpp"
#include "d2d/geometry.hpp"
#include "d2d/random.hpp"

namespace d2d {

/*!
 * Stages of the centralized discovery handshake.
 *
 *   idle -> request_sent      step 1, UE request to the BS (uplink)
 *   request_sent -> scheduled step 2, BS schedules the receiver (downlink)
 *   scheduled -> discovery_sent
 *                             step 3, discovery message tx -> rx (uplink band)
 *   discovery_sent -> sir_reported
 *                             step 4, rx reports the measured SIR to the BS
 *   sir_reported -> established | failed_retry
 *                             step 5, BS admission against the threshold
 *   failed_retry -> request_sent
 */
enum class SessionState
{
    idle,
    request_sent,
    scheduled,
    discovery_sent,
    sir_reported,
    established,
    failed_retry,
};

std::string_view to_string(SessionState state) noexcept;
std::optional<SessionState> parse_session_state(std::string_view text) noexcept;
bool is_valid_transition(SessionState from, SessionState to) noexcept;

enum class SignalingMode
{
    single_message,  //!< one contention slot carries the whole attempt
    full_signaling,  //!< steps 1, 3, 4 contend; steps 2, 5 take a downlink slot
};

enum class InterfererMode
{
    saturated,        //!< always-on cellular uplink PPP, redrawn every slot
    contention_only,  //!< only the other concurrent D2D transmitters
};

enum class ContentionModel
{
    fixed_population,  //!< all N pairs throw the dice every slot, even once established
    shrinking,         //!< dice over the pairs still awaiting an uplink step
};

struct DiscoverySession
{
    D2DPair pair;
    SessionState state = SessionState::idle;
    int slots_elapsed = 0;
    std::optional<int> slots_to_success;
    std::optional<SirSample> last_sir;
    std::vector<SessionState> history{SessionState::idle};

    static DiscoverySession start(D2DPair const& pair);
    bool established() const noexcept { return state == SessionState::established; }
    //! True when the next step is an uplink message that needs channel access.
    bool awaits_uplink() const noexcept;
};

enum class SlotAction
{
    silent,             //!< did not transmit
    request,            //!< step 1
    discovery,          //!< step 3 (or the whole attempt in single-message mode)
    sir_report,         //!< step 4
    downlink_schedule,  //!< step 2, received from the BS
    downlink_decision,  //!< step 5, received from the BS
    data,               //!< an established pair occupying its slot
};

std::string_view to_string(SlotAction action) noexcept;

struct PairSlotResult
{
    int pair_id = 0;
    SlotAction action = SlotAction::silent;
    bool contended = false;    //!< threw the dice this slot
    bool transmitted = false;
    bool collision = false;    //!< transmitted into a collided slot
    std::optional<SirSample> sir;
    bool success = false;      //!< sole transmitter and sir passes tau
    SessionState state_after = SessionState::idle;
};

struct SlotOutcome
{
    int slot_index = 0;
    std::vector<int> transmitting_pair_ids;
    bool collision = false;
    std::vector<PairSlotResult> pairs;

    PairSlotResult const* find(int pair_id) const noexcept;
};

//! Roll u uniform on {1..N}; transmit iff u equals the caller's id.
bool transmit_decision(int pair_id, int N, Rng& rng);

bool detect_collision(std::span<int const> transmitting_pair_ids) noexcept;

/*!
 * Advance one session by one slot.
 *
 * A pair that transmitted into a collision makes no progress. Otherwise
 * uplink steps need this pair to be the sole transmitter (and \p control_ok
 * for BS-bound messages); downlink steps always succeed. In single-message
 * mode a sole transmission walks the whole chain within the slot. Established
 * sessions are returned unchanged.
 */
DiscoverySession advance_session(DiscoverySession session,
                                 SlotOutcome const& slot,
                                 double tau_db,
                                 bool control_ok,
                                 SignalingMode mode = SignalingMode::single_message);

//! Uplink SIR from a UE to its serving BS over the shared channel.
SirSample control_link_sir(Point ue,
                           Point serving_bs,
                           std::span<Point const> interferer_txs,
                           ChannelParams const& params,
                           Rng& rng);

bool control_link_ok(Point ue,
                     Point serving_bs,
                     std::span<Point const> interferer_txs,
                     double tau_db,
                     ChannelParams const& params,
                     Rng& rng);

//! Dice override for tests: (rank, contenders, rng) -> transmit.
using DecisionFn = std::function<bool(int, int, Rng&)>;

struct SlotContext
{
    ChannelParams channel;
    double lambda_u = 0;
    double tau_db = 0;
    SignalingMode signaling = SignalingMode::single_message;
    InterfererMode interferers = InterfererMode::saturated;
    ContentionModel contention = ContentionModel::fixed_population;
    DecisionFn decide;
};

/*!
 * Execute one TDMA slot for every session of a realization.
 *
 * Contenders roll their dice in session order; if exactly one transmits, the
 * SIR of its message is measured at the intended receiver (the D2D receiver
 * for discovery and data, the serving BS for requests and reports). All
 * non-established sessions are then advanced.
 */
SlotOutcome run_slot(NetworkRealization const& realization,
                     std::vector<DiscoverySession>& sessions,
                     SlotContext const& context,
                     int slot_index,
                     Rng& rng);

// Trace log: slot_index,pair_id,action,collision,sir_db,state_after
struct TraceRow
{
    int slot_index = 0;
    int pair_id = 0;
    std::string action;
    bool collision = false;
    std::optional<double> sir_db;
    SessionState state_after = SessionState::idle;
};

void write_trace_header(std::ostream& os);
void write_trace(std::ostream& os, SlotOutcome const& slot);
std::vector<TraceRow> read_trace(std::istream& is);

}  // namespace d2d
