#include "patsim/session.hpp"

namespace patsim {

Session::Streams::Streams(std::uint64_t seed)
    : ac_disturbance(make_stream(seed, StreamId::AircraftDisturbance)),
      gw_disturbance(make_stream(seed, StreamId::GatewayDisturbance)),
      up_beacon_fade(make_stream(seed, StreamId::UplinkBeaconFade)),
      down_beacon_fade(make_stream(seed, StreamId::DownlinkBeaconFade)),
      ccr_fade(make_stream(seed, StreamId::CcrFade)),
      up_comm_fade(make_stream(seed, StreamId::UplinkCommFade)),
      down_comm_fade(make_stream(seed, StreamId::DownlinkCommFade)),
      gw_gimbal(make_stream(seed, StreamId::GatewayGimbal)),
      ac_gimbal(make_stream(seed, StreamId::AircraftGimbal)),
      gw_fsm(make_stream(seed, StreamId::GatewayFsm)),
      ac_fsm(make_stream(seed, StreamId::AircraftFsm)),
      gw_quadcell(make_stream(seed, StreamId::GatewayQuadcell)),
      ac_quadcell(make_stream(seed, StreamId::AircraftQuadcell)),
      gw_fpa(make_stream(seed, StreamId::GatewayFpa)),
      ac_fpa(make_stream(seed, StreamId::AircraftFpa)),
      gnss(make_stream(seed, StreamId::Gnss)),
      aoa(make_stream(seed, StreamId::Aoa)),
      wander(make_stream(seed, StreamId::BeamWander)) {}

Session::Session(ScenarioConfig cfg, SessionHooks hooks)
    : cfg_(std::move(cfg)),
      hooks_(std::move(hooks)),
      turbulence_(cfg_.effective_turbulence()),
      budget_(core::LinkBudget::from(cfg_)),
      rng_(cfg_.seed),
      clcp_period_(cfg_.clcp_period_slots()) {
    validate(cfg_);
}

core::SlotChannel Session::draw_channel() {
    core::SlotChannel ch;
    ch.up_beacon = channel::sample_gg(turbulence_, rng_.up_beacon_fade);
    ch.down_beacon = channel::sample_gg(turbulence_, rng_.down_beacon_fade);
    ch.up_comm = channel::sample_gg(turbulence_, rng_.up_comm_fade);
    ch.down_comm = channel::sample_gg(turbulence_, rng_.down_comm_fade);
    if (uses_ccr(cfg_.variant)) {
        ch.ccr.reserve(static_cast<std::size_t>(cfg_.ccr.count));
        for (int i = 0; i < cfg_.ccr.count; ++i) {
            ch.ccr.push_back(channel::sample_gg_correlated(turbulence_, cfg_.rho, rng_.ccr_fade));
        }
    }
    ch.wander_up = channel::sample_beam_wander(cfg_.atmosphere, rng_.wander);
    ch.wander_down = channel::sample_beam_wander(cfg_.atmosphere, rng_.wander);
    return ch;
}

core::OlcpStreams Session::olcp_streams() {
    return {rng_.gw_gimbal, rng_.ac_gimbal, rng_.gw_fpa, rng_.ac_fpa, rng_.gnss, rng_.aoa};
}

SessionPhase Session::tracking_slot(const core::SlotLinks& links) {
    if (++clcp_counter_ >= clcp_period_) {
        clcp_counter_ = 0;
        const Angle2 e_gw = gw_.axis_error();
        const Angle2 e_ac = ac_.axis_error();
        const double p_up = links.up_beacon_dbm(e_gw);
        const double p_down = links.down_beacon_dbm(e_gw, e_ac);
        // Both FPAs sample the same instant; either one losing its beacon
        // drops the link.
        if (!devices::fpa_sees(e_gw, p_down, cfg_.fpa) || !devices::fpa_sees(e_ac, p_up, cfg_.fpa)) {
            return SessionPhase::LinkOutage;
        }
        core::clcp_step(gw_, e_gw, p_down, cfg_.fpa, cfg_.gimbal, rng_.gw_fpa, rng_.gw_gimbal);
        core::clcp_step(ac_, e_ac, p_up, cfg_.fpa, cfg_.gimbal, rng_.ac_fpa, rng_.ac_gimbal);
    }

    const Angle2 pre_gw = gw_.axis_error();
    const Angle2 pre_ac = ac_.axis_error();
    // Each quadcell sees the far end's communication beam, whose pointing is
    // being corrected by the far end's own loop within the same slot.
    const Angle2 next_gw = core::fine_tracking_preview(gw_, pre_gw, cfg_.quadcell, cfg_.fsm);
    const Angle2 next_ac = core::fine_tracking_preview(ac_, pre_ac, cfg_.quadcell, cfg_.fsm);
    const double p_into_gw = links.down_comm_dbm(next_ac);
    const double p_into_ac = links.up_comm_dbm(next_gw);

    const auto gw = core::fine_tracking_step(gw_, pre_gw, p_into_gw, cfg_.quadcell, cfg_.fsm, rng_.gw_quadcell,
                                             rng_.gw_fsm);
    const auto ac = core::fine_tracking_step(ac_, pre_ac, p_into_ac, cfg_.quadcell, cfg_.fsm, rng_.ac_quadcell,
                                             rng_.ac_fsm);
    return gw.tracking() && ac.tracking() ? SessionPhase::WellConnected : SessionPhase::FineTrackingOutage;
}

SlotRecord Session::step() {
    const double dt = cfg_.slot_dt_s;
    ac_.disturbance = core::disturbance_step(ac_.disturbance, cfg_.aircraft_disturbance, dt, rng_.ac_disturbance);
    gw_.disturbance = core::disturbance_step(gw_.disturbance, cfg_.gateway_disturbance, dt, rng_.gw_disturbance);
    if (hooks_.disturbance) {
        hooks_.disturbance(slot_, gw_, ac_);
    }
    core::SlotChannel ch = draw_channel();
    if (hooks_.channel) {
        hooks_.channel(slot_, ch);
    }
    const core::SlotLinks links(budget_, ch, uses_ccr(cfg_.variant), cfg_.ccr);

    SessionPhase recorded = phase_;
    SessionPhase next = phase_;
    switch (phase_) {
        case SessionPhase::LinkRequest:
            // RF exchange of the position report.
            next = SessionPhase::Olcp;
            olcp_.reset();
            break;
        case SessionPhase::LinkOutage:
            // Re-acquisition starts in the slot after the outage.
            olcp_.reset();
            [[fallthrough]];
        case SessionPhase::Olcp: {
            if (!olcp_) {
                olcp_ = core::olcp_begin(cfg_, gw_, ac_, olcp_streams());
            }
            recorded = SessionPhase::Olcp;
            switch (core::olcp_step(*olcp_, gw_, ac_, links, cfg_, olcp_streams())) {
                case core::OlcpOutcome::Acquired:
                    // both ends inside the quadcell FoV at the end of the slot
                    recorded = SessionPhase::WellConnected;
                    next = SessionPhase::WellConnected;
                    olcp_.reset();
                    gw_.fsm_tilt = {};
                    ac_.fsm_tilt = {};
                    clcp_counter_ = 0;
                    break;
                case core::OlcpOutcome::Failed:
                    next = SessionPhase::LinkRequest;
                    olcp_.reset();
                    break;
                case core::OlcpOutcome::Scanning:
                    next = SessionPhase::Olcp;
                    break;
            }
            break;
        }
        case SessionPhase::WellConnected:
        case SessionPhase::FineTrackingOutage:
            recorded = tracking_slot(links);
            next = recorded;
            break;
    }

    SlotRecord rec;
    rec.t = static_cast<double>(slot_) * dt;
    rec.phase = recorded;
    const Angle2 e_gw = gw_.axis_error();
    const Angle2 e_ac = ac_.axis_error();
    rec.p_rx_up_beacon_dbm = links.up_beacon_dbm(e_gw);
    rec.p_rx_down_beacon_dbm = links.down_beacon_dbm(e_gw, e_ac);
    rec.p_rx_up_comm_dbm = links.up_comm_dbm(e_gw);
    rec.p_rx_down_comm_dbm = links.down_comm_dbm(e_ac);
    rec.links.up_beacon = devices::fpa_sees(e_ac, rec.p_rx_up_beacon_dbm, cfg_.fpa);
    rec.links.down_beacon = devices::fpa_sees(e_gw, rec.p_rx_down_beacon_dbm, cfg_.fpa);
    const bool comm_on = recorded == SessionPhase::WellConnected || recorded == SessionPhase::FineTrackingOutage;
    rec.links.up_comm = comm_on && rec.links.down_beacon && rec.p_rx_up_comm_dbm >= cfg_.comm_threshold_dbm;
    rec.links.down_comm = comm_on && rec.links.down_beacon && rec.p_rx_down_comm_dbm >= cfg_.comm_threshold_dbm;
    rec.err_down_comm = e_ac.norm();
    rec.pl_down_comm_db = channel::pointing_loss_db(e_ac, cfg_.comm_beam.divergence_full);
    rec.scan_index = recorded == SessionPhase::Olcp ? gw_.scan_index : 0;
    rec.down_beacon_aircraft_error = links.down_beacon_aircraft_error(e_ac).norm();

    phase_ = next;
    ++slot_;
    return rec;
}

}  // namespace patsim
