#include "patsim/pat_types.hpp"

namespace patsim {

std::string_view to_token(SessionPhase p) {
    switch (p) {
        case SessionPhase::LinkRequest: return "link_request";
        case SessionPhase::Olcp: return "olcp";
        case SessionPhase::WellConnected: return "well_connected";
        case SessionPhase::FineTrackingOutage: return "ft_outage";
        case SessionPhase::LinkOutage: return "link_outage";
    }
    return "?";
}

std::string_view to_token(AlgorithmVariant v) {
    switch (v) {
        case AlgorithmVariant::Baseline: return "baseline";
        case AlgorithmVariant::BaselineAoa: return "baseline_aoa";
        case AlgorithmVariant::BaselineCcr: return "baseline_ccr";
        case AlgorithmVariant::Proposed: return "proposed";
    }
    return "?";
}

std::optional<SessionPhase> phase_from_token(std::string_view s) {
    for (auto p : kAllPhases) {
        if (to_token(p) == s) {
            return p;
        }
    }
    return std::nullopt;
}

std::optional<AlgorithmVariant> variant_from_token(std::string_view s) {
    for (auto v : kAllVariants) {
        if (to_token(v) == s) {
            return v;
        }
    }
    return std::nullopt;
}

bool is_legal_transition(SessionPhase from, SessionPhase to) {
    using P = SessionPhase;
    if (from == to) {
        return true;
    }
    switch (from) {
        case P::LinkRequest: return to == P::Olcp;
        case P::Olcp: return to == P::WellConnected || to == P::LinkRequest;
        case P::WellConnected: return to == P::FineTrackingOutage || to == P::LinkOutage;
        case P::FineTrackingOutage: return to == P::WellConnected || to == P::LinkOutage;
        case P::LinkOutage: return to == P::Olcp;
    }
    return false;
}

}  // namespace patsim
