#include "patsim/pat_core.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace patsim::core {

namespace {

constexpr double kPi = std::numbers::pi;

// Largest half spacing between ring dwells at radius r such that every point
// at radius a and b (hence, by convexity, in between) is within c of a dwell.
// Negative when no spacing works.
double ring_half_spacing(double r, double a, double b, double c) {
    double need = -1.0;
    for (const double rho : {a, b}) {
        if (rho <= 0.0) {
            continue;
        }
        need = std::max(need, (rho * rho + r * r - c * c) / (2.0 * rho * r));
    }
    if (need > 1.0) {
        return -1.0;
    }
    return std::acos(std::max(-1.0, need));
}

int ring_dwell_count(double r, double a, double b, double c) {
    const double phi = ring_half_spacing(r, a, b, c);
    if (phi <= 0.0) {
        return INT_MAX;
    }
    const int n_cover = static_cast<int>(std::ceil(kPi / phi - 1e-12));
    const int n_chord = 2.0 * r <= c ? 1 : static_cast<int>(std::ceil(kPi / std::asin(c / (2.0 * r)) - 1e-12));
    return std::max({1, n_cover, n_chord});
}

}  // namespace

double scan_footprint_radius(double beacon_divergence_full, double overlap) {
    return overlap * beacon_divergence_full / 2.0;
}

std::vector<Angle2> build_scan_pattern(double uncertainty_sigma, double beacon_divergence_full,
                                       double overlap) {
    if (!(uncertainty_sigma >= 0.0) || !(beacon_divergence_full > 0.0) || !(overlap > 0.0 && overlap <= 1.0)) {
        throw std::domain_error("scan pattern needs sigma >= 0, divergence > 0, 0 < overlap <= 1");
    }
    // Designed against a hair-smaller footprint so boundary points stay covered
    // after rounding.
    const double c = scan_footprint_radius(beacon_divergence_full, overlap) * (1.0 - 1e-9);
    const double radius = 3.0 * uncertainty_sigma;

    std::vector<Angle2> pattern{{0.0, 0.0}};
    if (radius <= scan_footprint_radius(beacon_divergence_full, overlap)) {
        return pattern;
    }
    double covered = c;
    double prev_r = 0.0;
    int ring = 0;
    constexpr int kWidthSteps = 40;
    constexpr int kRadiusSteps = 200;
    while (covered < radius) {
        const double a = covered;
        // Each ring covers a band [a, b] and may sit at most c beyond the
        // previous ring. Prefer closing the disc; otherwise take the band with
        // the fewest dwells per unit of radial coverage.
        double best_r = 0.0;
        double best_b = 0.0;
        int best_n = INT_MAX;
        double best_cost = HUGE_VAL;
        bool best_closes = false;
        for (int k = kWidthSteps; k >= 1; --k) {
            const double b = std::min(radius, a + c * k / kWidthSteps);
            const bool closes = b >= radius;
            const double lo = std::max(b - c, 1e-6 * c);
            const double hi = std::min(a + c, prev_r + c);
            for (int i = 0; i <= kRadiusSteps && lo <= hi; ++i) {
                const double r = lo + (hi - lo) * i / kRadiusSteps;
                const int n = ring_dwell_count(r, a, b, c);
                if (n == INT_MAX) {
                    continue;
                }
                const double cost = n / (b - a);
                const bool better = closes != best_closes ? closes : (closes ? n < best_n : cost < best_cost);
                if (better) {
                    best_r = r;
                    best_b = b;
                    best_n = n;
                    best_cost = cost;
                    best_closes = closes;
                }
            }
        }
        if (best_n == INT_MAX) {
            throw std::logic_error("scan ring search found no feasible radius");
        }

        const double start = (ring % 2 == 1) ? kPi / best_n : 0.0;
        for (int j = 0; j < best_n; ++j) {
            const double th = start + 2.0 * kPi * j / best_n;
            pattern.push_back({best_r * std::cos(th), best_r * std::sin(th)});
        }
        covered = best_b;
        prev_r = best_r;
        ++ring;
    }
    return pattern;
}

Angle2 disturbance_step(const Angle2& state, const DisturbanceSpec& spec, double dt, Rng& rng) {
    if (!(dt > 0.0)) {
        throw std::domain_error("disturbance time step must be positive");
    }
    const double rho = std::exp(-dt / spec.gm_tau);
    const double drive = std::sqrt(1.0 - rho * rho) * spec.gm_sigma;
    const double n_az = draw_normal(rng);
    const double n_el = draw_normal(rng);
    Angle2 next{rho * state.az + drive * n_az, rho * state.el + drive * n_el};

    const double trigger = draw_uniform(rng);
    const double magnitude = draw_uniform(rng, spec.jump_min, spec.jump_max);
    const double direction = draw_uniform(rng, 0.0, 2.0 * kPi);
    if (trigger < spec.jump_rate * dt) {
        next += Angle2{magnitude * std::cos(direction), magnitude * std::sin(direction)};
    }
    return next;
}

FineTrackingResult fine_tracking_step(TerminalState& terminal, const Angle2& true_offset,
                                      double rx_power_dbm, const devices::QuadcellSpec& quadcell,
                                      const devices::FsmSpec& fsm, Rng& quadcell_rng, Rng& fsm_rng) {
    const auto reading = devices::quadcell_measure(true_offset, rx_power_dbm, quadcell, quadcell_rng);
    if (!reading.ok()) {
        return {true_offset, reading.outcome, false};
    }
    const auto moved = devices::fsm_correct(-reading.measured, terminal.fsm_tilt, fsm, fsm_rng);
    const Angle2 residual = true_offset + (moved.tilt - terminal.fsm_tilt);
    terminal.fsm_tilt = moved.tilt;
    return {residual, devices::QuadcellOutcome::Tracking, moved.saturated};
}

Angle2 fine_tracking_preview(const TerminalState& terminal, const Angle2& true_offset,
                             const devices::QuadcellSpec& quadcell, const devices::FsmSpec& fsm) {
    if (true_offset.norm() > quadcell.fov) {
        return true_offset;
    }
    const Angle2 estimate = devices::quadcell_linear_inverse(
        devices::quadcell_response(true_offset, quadcell.spot_radius), quadcell.spot_radius);
    Angle2 tilt = terminal.fsm_tilt - estimate;
    clamp_radial(tilt, fsm.range);
    return true_offset + (tilt - terminal.fsm_tilt);
}

ClcpOutcome clcp_step(TerminalState& terminal, const Angle2& beacon_offset, double rx_power_dbm,
                      const devices::FpaSpec& fpa, const devices::GimbalSpec& gimbal, Rng& fpa_rng,
                      Rng& gimbal_rng) {
    const auto reading = devices::fpa_detect(beacon_offset, rx_power_dbm, fpa, fpa_rng);
    if (!reading.detected) {
        return ClcpOutcome::NotDetected;
    }
    // The FPA looks through the mirror; the coarse part of the offset is the
    // measurement with the current tilt removed.
    terminal.gimbal_dir += devices::gimbal_closed_loop_correct(reading.measured - terminal.fsm_tilt, gimbal, gimbal_rng);
    terminal.fsm_tilt = {};
    terminal.slots_since_clcp = 0;
    return ClcpOutcome::Locked;
}

LinkBudget LinkBudget::from(const ScenarioConfig& cfg) {
    const double z = cfg.link_distance_km;
    const auto& atm = cfg.atmosphere;
    LinkBudget b;
    b.up_beacon_dbm = cfg.beacon_beam.tx_power_dbm +
                      channel::link_budget_gain_db(cfg.beacon_beam, z, cfg.aircraft_aperture_m, atm);
    b.down_beacon_dbm = cfg.beacon_beam.tx_power_dbm +
                        channel::link_budget_gain_db(cfg.beacon_beam, z, cfg.gateway_aperture_m, atm);
    // Round trip: the return is spread like a direct beacon into the gateway
    // aperture, pays extinction twice, and the retroreflector efficiency is
    // applied by the array gain.
    b.ccr_return_dbm = b.down_beacon_dbm + channel::atmospheric_loss_db(atm, cfg.beacon_beam.wavelength_nm, z);
    b.up_comm_dbm = cfg.comm_beam.tx_power_dbm +
                    channel::link_budget_gain_db(cfg.comm_beam, z, cfg.aircraft_aperture_m, atm);
    b.down_comm_dbm = cfg.comm_beam.tx_power_dbm +
                      channel::link_budget_gain_db(cfg.comm_beam, z, cfg.gateway_aperture_m, atm);
    b.beacon_divergence = cfg.beacon_beam.divergence_full;
    b.comm_divergence = cfg.comm_beam.divergence_full;
    return b;
}

namespace {

double fade_db(double irradiance) { return 10.0 * std::log10(irradiance); }

}  // namespace

SlotLinks::SlotLinks(const LinkBudget& budget, const SlotChannel& channel, bool retroreflector,
                     const devices::CcrArraySpec& ccr)
    : budget_(budget), channel_(channel), retro_(retroreflector) {
    if (retro_) {
        ccr_gain_db_ = fade_db(devices::ccr_return_gain(ccr, channel_.ccr, {}).gain);
    }
}

double SlotLinks::up_beacon_dbm(const Angle2& gw_axis) const {
    return budget_.up_beacon_dbm + channel::pointing_loss_db(gw_axis + channel_.wander_up, budget_.beacon_divergence) +
           fade_db(channel_.up_beacon);
}

double SlotLinks::down_beacon_dbm(const Angle2& gw_axis, const Angle2& ac_axis) const {
    if (retro_) {
        // Only the uplink pointing matters: the array sends the light back
        // along its arrival direction.
        return budget_.ccr_return_dbm +
               channel::pointing_loss_db(gw_axis + channel_.wander_up, budget_.beacon_divergence) + ccr_gain_db_;
    }
    return budget_.down_beacon_dbm +
           channel::pointing_loss_db(ac_axis + channel_.wander_down, budget_.beacon_divergence) +
           fade_db(channel_.down_beacon);
}

double SlotLinks::up_comm_dbm(const Angle2& gw_axis) const {
    return budget_.up_comm_dbm + channel::pointing_loss_db(gw_axis + channel_.wander_up, budget_.comm_divergence) +
           fade_db(channel_.up_comm);
}

double SlotLinks::down_comm_dbm(const Angle2& ac_axis) const {
    return budget_.down_comm_dbm +
           channel::pointing_loss_db(ac_axis + channel_.wander_down, budget_.comm_divergence) +
           fade_db(channel_.down_comm);
}

Angle2 SlotLinks::down_beacon_aircraft_error(const Angle2& ac_axis) const {
    if (retro_) {
        return {};
    }
    return ac_axis;
}

OlcpState olcp_begin(const ScenarioConfig& cfg, TerminalState& gw, TerminalState& ac, OlcpStreams streams) {
    OlcpState st;
    const double sigma_g = devices::gnss_angle_sigma(cfg.positioning.gnss_sigma_m, cfg.link_distance_km);
    const Angle2 gnss = draw_angle2(streams.gnss, sigma_g);
    Angle2 estimate = gnss;
    double sigma = sigma_g;
    if (uses_aoa(cfg.variant)) {
        const Angle2 aoa = devices::aoa_estimate({}, cfg.positioning, streams.aoa);
        if (cfg.positioning.aoa_sigma == 0.0 || sigma_g == 0.0) {
            // A noiseless source dominates the combination.
            estimate = cfg.positioning.aoa_sigma == 0.0 ? aoa : gnss;
            sigma = 0.0;
        } else {
            const auto fused = devices::fuse_estimates(gnss, sigma_g, aoa, cfg.positioning.aoa_sigma);
            estimate = fused.angle;
            sigma = fused.sigma;
        }
    }
    st.estimate_error = estimate;
    st.uncertainty_sigma = sigma;
    thread_local struct {
        double sigma = -1.0, divergence = 0.0, overlap = 0.0;
        std::vector<Angle2> pattern;
    } memo;
    if (memo.sigma != sigma || memo.divergence != cfg.beacon_beam.divergence_full || memo.overlap != cfg.scan_overlap) {
        memo.pattern = build_scan_pattern(sigma, cfg.beacon_beam.divergence_full, cfg.scan_overlap);
        memo.sigma = sigma;
        memo.divergence = cfg.beacon_beam.divergence_full;
        memo.overlap = cfg.scan_overlap;
    }
    st.pattern = memo.pattern;

    gw.fsm_tilt = {};
    gw.scan_index = 0;
    ac.fsm_tilt = {};
    ac.scan_index = 0;
    // The aircraft knows its own attitude when the attempt starts and points
    // open loop at the gateway's surveyed position.
    ac.gimbal_dir = devices::gimbal_open_loop_point(-ac.disturbance, cfg.gimbal, streams.aircraft_gimbal);
    return st;
}

namespace {

// Moves to the next dwell; Failed once the pattern has been swept
// max_scan_repeats times.
OlcpOutcome advance_dwell(OlcpState& st, const ScenarioConfig& cfg) {
    st.stage = OlcpStage::Scanning;
    ++st.dwell;
    if (st.dwell >= static_cast<int>(st.pattern.size())) {
        st.dwell = 0;
        ++st.pass;
        if (st.pass >= cfg.max_scan_repeats) {
            return OlcpOutcome::Failed;
        }
    }
    return OlcpOutcome::Scanning;
}

// Closed-loop gimbal update from the FPA; the mirror is parked during OLCP.
bool track_with_fpa(TerminalState& t, double rx_dbm, const ScenarioConfig& cfg, Rng& fpa_rng, Rng& gimbal_rng) {
    return clcp_step(t, t.axis_error(), rx_dbm, cfg.fpa, cfg.gimbal, fpa_rng, gimbal_rng) == ClcpOutcome::Locked;
}

}  // namespace

OlcpOutcome olcp_step(OlcpState& st, TerminalState& gw, TerminalState& ac, const SlotLinks& links,
                      const ScenarioConfig& cfg, OlcpStreams streams) {
    switch (st.stage) {
        case OlcpStage::Scanning: {
            const Angle2 target = st.estimate_error + st.pattern[static_cast<std::size_t>(st.dwell)] - gw.disturbance;
            gw.gimbal_dir = devices::gimbal_open_loop_point(target, cfg.gimbal, streams.gateway_gimbal);
            gw.fsm_tilt = {};
            gw.scan_index = st.dwells_done++;
            const double p_up = links.up_beacon_dbm(gw.axis_error());
            if (track_with_fpa(ac, p_up, cfg, streams.aircraft_fpa, streams.aircraft_gimbal)) {
                st.stage = OlcpStage::AircraftLocked;
                return OlcpOutcome::Scanning;
            }
            return advance_dwell(st, cfg);
        }
        case OlcpStage::AircraftLocked: {
            // Gateway holds the dwell; the aircraft keeps centring the beacon.
            track_with_fpa(ac, links.up_beacon_dbm(gw.axis_error()), cfg, streams.aircraft_fpa,
                           streams.aircraft_gimbal);
            const double p_down = links.down_beacon_dbm(gw.axis_error(), ac.axis_error());
            if (track_with_fpa(gw, p_down, cfg, streams.gateway_fpa, streams.gateway_gimbal)) {
                st.stage = OlcpStage::GatewayLocked;
                return OlcpOutcome::Scanning;
            }
            return advance_dwell(st, cfg);
        }
        case OlcpStage::GatewayLocked: {
            track_with_fpa(ac, links.up_beacon_dbm(gw.axis_error()), cfg, streams.aircraft_fpa,
                           streams.aircraft_gimbal);
            track_with_fpa(gw, links.down_beacon_dbm(gw.axis_error(), ac.axis_error()), cfg, streams.gateway_fpa,
                           streams.gateway_gimbal);
            if (gw.axis_error().norm() < cfg.quadcell.fov && ac.axis_error().norm() < cfg.quadcell.fov) {
                return OlcpOutcome::Acquired;
            }
            return advance_dwell(st, cfg);
        }
    }
    return OlcpOutcome::Scanning;
}

}  // namespace patsim::core
