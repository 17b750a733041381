#pragma once

#include <functional>
#include <optional>

#include "patsim/pat_core.hpp"
#include "patsim/scenario.hpp"

namespace patsim {

/// One 0.1 s trace row. Powers are in dBm, angles in rad.
struct SlotRecord {
    double t = 0.0;
    SessionPhase phase = SessionPhase::LinkRequest;
    LinkSet links;
    double err_down_comm = 0.0;
    double pl_down_comm_db = 0.0;
    double p_rx_up_beacon_dbm = 0.0;
    double p_rx_down_beacon_dbm = 0.0;
    double p_rx_up_comm_dbm = 0.0;
    double p_rx_down_comm_dbm = 0.0;
    int scan_index = 0;
    // not serialized
    double down_beacon_aircraft_error = 0.0;
};

/// Test hooks applied after the random draws of each slot, so scripted
/// scenarios can force a fade or a platform jump.
struct SessionHooks {
    std::function<void(long slot, core::SlotChannel&)> channel;
    std::function<void(long slot, TerminalState& gateway, TerminalState& aircraft)> disturbance;
};

/// The five-state PAT session over the four links. The mission starts in
/// link outage with the request issued immediately, so the first slot is a
/// LinkRequest slot.
///
/// Each SlotRecord reports the link status during its slot: an outage
/// detected in a slot is recorded in that slot, and so is a successful
/// acquisition (the confirming slot is WellConnected).
class Session {
public:
    explicit Session(ScenarioConfig cfg, SessionHooks hooks = {});

    /// Advances one slot.
    SlotRecord step();

    [[nodiscard]] SessionPhase phase() const { return phase_; }
    [[nodiscard]] long slot() const { return slot_; }
    [[nodiscard]] const TerminalState& gateway() const { return gw_; }
    [[nodiscard]] const TerminalState& aircraft() const { return ac_; }
    [[nodiscard]] const ScenarioConfig& config() const { return cfg_; }

private:
    struct Streams {
        explicit Streams(std::uint64_t seed);
        Rng ac_disturbance, gw_disturbance;
        Rng up_beacon_fade, down_beacon_fade, ccr_fade, up_comm_fade, down_comm_fade;
        Rng gw_gimbal, ac_gimbal, gw_fsm, ac_fsm, gw_quadcell, ac_quadcell, gw_fpa, ac_fpa;
        Rng gnss, aoa, wander;
    };

    core::SlotChannel draw_channel();
    core::OlcpStreams olcp_streams();
    SessionPhase tracking_slot(const core::SlotLinks& links);

    ScenarioConfig cfg_;
    SessionHooks hooks_;
    channel::TurbulenceParams turbulence_;
    core::LinkBudget budget_;
    Streams rng_;
    TerminalState gw_;
    TerminalState ac_;
    SessionPhase phase_ = SessionPhase::LinkRequest;
    std::optional<core::OlcpState> olcp_;
    int clcp_period_ = 10;
    int clcp_counter_ = 0;
    long slot_ = 0;
};

}  // namespace patsim
