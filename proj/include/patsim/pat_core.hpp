#pragma once

#include <vector>

#include "patsim/channel.hpp"
#include "patsim/devices.hpp"
#include "patsim/pat_types.hpp"
#include "patsim/random.hpp"
#include "patsim/scenario.hpp"

// PAT control logic: acquisition scan, coarse and fine tracking loops, and
// the per-slot link model they act on.
namespace patsim::core {

/// Radius around a dwell center that the scan treats as illuminated:
/// overlap * divergence / 2.
double scan_footprint_radius(double beacon_divergence_full, double overlap);

/// Dwell centers covering the disc of radius 3*uncertainty_sigma, first dwell
/// at the origin, then concentric rings at increasing radius (a stepped
/// Archimedean spiral). Along-ring and ring-to-ring spacing never exceed the
/// footprint radius, and every point of the disc lies within one footprint
/// radius of some dwell.
std::vector<Angle2> build_scan_pattern(double uncertainty_sigma, double beacon_divergence_full,
                                       double overlap);

/// One slot of the attitude disturbance. Always makes the same five draws
/// (two normals, jump trigger, magnitude, direction) whether or not a jump
/// fires.
Angle2 disturbance_step(const Angle2& state, const DisturbanceSpec& spec, double dt, Rng& rng);

struct FineTrackingResult {
    Angle2 residual;
    devices::QuadcellOutcome outcome = devices::QuadcellOutcome::Tracking;
    bool saturated = false;

    [[nodiscard]] bool tracking() const { return outcome == devices::QuadcellOutcome::Tracking; }
};

/// Quadcell measurement followed by a deadbeat FSM update. On OutOfFov or
/// LowPower the mirror is left untouched and the residual is the input offset.
FineTrackingResult fine_tracking_step(TerminalState& terminal, const Angle2& true_offset,
                                      double rx_power_dbm, const devices::QuadcellSpec& quadcell,
                                      const devices::FsmSpec& fsm, Rng& quadcell_rng, Rng& fsm_rng);

/// Noise-free residual fine_tracking_step would leave, ignoring power. Used to
/// evaluate the far end's transmit pointing within the same slot.
Angle2 fine_tracking_preview(const TerminalState& terminal, const Angle2& true_offset,
                             const devices::QuadcellSpec& quadcell, const devices::FsmSpec& fsm);

enum class ClcpOutcome { Locked, NotDetected };

/// Closed-loop coarse pointing. On detection the gimbal takes over the
/// measured offset together with the FSM tilt and the mirror is recentred.
ClcpOutcome clcp_step(TerminalState& terminal, const Angle2& beacon_offset, double rx_power_dbm,
                      const devices::FpaSpec& fpa, const devices::GimbalSpec& gimbal, Rng& fpa_rng,
                      Rng& gimbal_rng);

/// Deterministic part of each link budget, in dBm at perfect pointing and
/// unit irradiance.
struct LinkBudget {
    double up_beacon_dbm = 0.0;
    double down_beacon_dbm = 0.0;
    double ccr_return_dbm = 0.0;  // before the array diversity gain
    double up_comm_dbm = 0.0;
    double down_comm_dbm = 0.0;
    double beacon_divergence = 0.0;
    double comm_divergence = 0.0;

    static LinkBudget from(const ScenarioConfig& cfg);
};

/// Random channel state of one coherence slot.
struct SlotChannel {
    double up_beacon = 1.0;
    double down_beacon = 1.0;
    double up_comm = 1.0;
    double down_comm = 1.0;
    std::vector<channel::FadePair> ccr;  // empty unless the variant uses CCRs
    Angle2 wander_up;    // gateway -> aircraft beams
    Angle2 wander_down;  // aircraft -> gateway beams
};

/// Received powers for given terminal pointing errors within one slot.
class SlotLinks {
public:
    SlotLinks(const LinkBudget& budget, const SlotChannel& channel, bool retroreflector,
              const devices::CcrArraySpec& ccr);

    [[nodiscard]] double up_beacon_dbm(const Angle2& gw_axis) const;
    [[nodiscard]] double down_beacon_dbm(const Angle2& gw_axis, const Angle2& ac_axis) const;
    [[nodiscard]] double up_comm_dbm(const Angle2& gw_axis) const;
    [[nodiscard]] double down_comm_dbm(const Angle2& ac_axis) const;

    /// Aircraft contribution to the downlink beacon pointing error. Exactly
    /// zero when the downlink beacon is the retroreflected uplink beacon.
    [[nodiscard]] Angle2 down_beacon_aircraft_error(const Angle2& ac_axis) const;

    [[nodiscard]] bool retroreflector() const { return retro_; }

private:
    LinkBudget budget_;
    SlotChannel channel_;
    bool retro_;
    double ccr_gain_db_ = 0.0;
};

enum class OlcpStage { Scanning, AircraftLocked, GatewayLocked };
enum class OlcpOutcome { Scanning, Acquired, Failed };

/// Acquisition attempt state, created fresh from each position fix.
struct OlcpState {
    std::vector<Angle2> pattern;
    Angle2 estimate_error;  // position estimate minus truth, as seen from the gateway
    double uncertainty_sigma = 0.0;
    OlcpStage stage = OlcpStage::Scanning;
    int dwell = 0;
    int pass = 0;
    int dwells_done = 0;
};

struct OlcpStreams {
    Rng& gateway_gimbal;
    Rng& aircraft_gimbal;
    Rng& gateway_fpa;
    Rng& aircraft_fpa;
    Rng& gnss;
    Rng& aoa;
};

/// Starts an acquisition: draws the position fix (GNSS, fused with AoA when
/// the variant uses it), builds the scan, and points the aircraft open loop.
OlcpState olcp_begin(const ScenarioConfig& cfg, TerminalState& gw, TerminalState& ac, OlcpStreams streams);

/// One slot of open-loop coarse pointing. Scanning dwells one slot per
/// pattern entry; after the aircraft FPA sees the uplink beacon the
/// handshake takes one slot each for gateway detection and confirmation.
OlcpOutcome olcp_step(OlcpState& state, TerminalState& gw, TerminalState& ac, const SlotLinks& links,
                      const ScenarioConfig& cfg, OlcpStreams streams);

}  // namespace patsim::core
