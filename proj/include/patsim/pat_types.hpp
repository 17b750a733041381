#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "patsim/angle.hpp"

namespace patsim {

enum class SessionPhase { LinkRequest, Olcp, WellConnected, FineTrackingOutage, LinkOutage };

inline constexpr std::array kAllPhases{SessionPhase::LinkRequest, SessionPhase::Olcp,
                                       SessionPhase::WellConnected, SessionPhase::FineTrackingOutage,
                                       SessionPhase::LinkOutage};

enum class AlgorithmVariant { Baseline, BaselineAoa, BaselineCcr, Proposed };

inline constexpr std::array kAllVariants{AlgorithmVariant::Baseline, AlgorithmVariant::BaselineAoa,
                                         AlgorithmVariant::BaselineCcr, AlgorithmVariant::Proposed};

constexpr bool uses_aoa(AlgorithmVariant v) {
    return v == AlgorithmVariant::BaselineAoa || v == AlgorithmVariant::Proposed;
}

constexpr bool uses_ccr(AlgorithmVariant v) {
    return v == AlgorithmVariant::BaselineCcr || v == AlgorithmVariant::Proposed;
}

std::string_view to_token(SessionPhase p);
std::string_view to_token(AlgorithmVariant v);
std::optional<SessionPhase> phase_from_token(std::string_view s);
std::optional<AlgorithmVariant> variant_from_token(std::string_view s);

/// True if `from -> to` is an edge of the session state machine. Self loops
/// are legal for every phase.
bool is_legal_transition(SessionPhase from, SessionPhase to);

/// Connectivity of the four constituent links in one slot. In the CCR
/// variants down_beacon is the retroreflected uplink beacon.
struct LinkSet {
    bool up_beacon = false;
    bool down_beacon = false;
    bool up_comm = false;
    bool down_comm = false;

    friend bool operator==(const LinkSet&, const LinkSet&) = default;
};

/// Control-loop state of one terminal. Angles are relative to the true line
/// of sight; the optical axis error is gimbal_dir + disturbance + fsm_tilt.
struct TerminalState {
    Angle2 gimbal_dir;
    Angle2 fsm_tilt;
    Angle2 disturbance;
    int scan_index = 0;
    int slots_since_clcp = 0;

    [[nodiscard]] Angle2 axis_error() const { return gimbal_dir + disturbance + fsm_tilt; }
};

/// Platform attitude disturbance: per-axis first-order Gauss-Markov process
/// plus Poisson-arriving step jumps of uniform magnitude and direction.
struct DisturbanceSpec {
    double gm_sigma = 5e-3;
    double gm_tau = 60.0;
    double jump_rate = 0.5 / 60.0;  // 1/s
    double jump_min = 10e-3;
    double jump_max = 40e-3;

    static DisturbanceSpec none() { return {0.0, 5.0, 0.0, 0.0, 0.0}; }
};

}  // namespace patsim
