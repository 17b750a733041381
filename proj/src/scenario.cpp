#include "patsim/scenario.hpp"

#include <cmath>

namespace patsim {

namespace {

void require(bool ok, const char* field, const char* constraint) {
    if (!ok) {
        throw ConfigError(field, std::string("must satisfy ") + constraint);
    }
}

void check_disturbance(const DisturbanceSpec& d, const char* sigma, const char* tau, const char* rate,
                       const char* jmin, const char* jmax) {
    require(d.gm_sigma >= 0.0 && std::isfinite(d.gm_sigma), sigma, ">= 0");
    require(d.gm_tau > 0.0, tau, "> 0");
    require(d.jump_rate >= 0.0 && std::isfinite(d.jump_rate), rate, ">= 0");
    require(d.jump_min >= 0.0, jmin, ">= 0");
    require(d.jump_max >= d.jump_min && std::isfinite(d.jump_max), jmax, ">= jump min");
}

}  // namespace

channel::TurbulenceParams ScenarioConfig::effective_turbulence() const {
    if (rytov_variance) {
        return channel::gg_params_from_rytov(*rytov_variance);
    }
    return turbulence;
}

long ScenarioConfig::slot_count() const {
    return std::lround(std::floor(mission_duration_s / slot_dt_s + 1e-9));
}

int ScenarioConfig::clcp_period_slots() const {
    return std::max(1, static_cast<int>(std::lround(1.0 / (clcp_rate_hz * slot_dt_s))));
}

void validate(const ScenarioConfig& c) {
    require(c.link_distance_km > 0.0 && std::isfinite(c.link_distance_km), "link_distance_km", "> 0");
    require(c.positioning.gnss_sigma_m >= 0.0, "gnss_sigma_m", ">= 0");
    require(c.positioning.aoa_sigma >= 0.0, "aoa_sigma_rad", ">= 0");

    require(c.quadcell.fov > 0.0, "quadcell_fov_rad", "> 0");
    require(c.quadcell.nea_coeff >= 0.0, "quadcell_nea_coeff_rad", ">= 0");
    require(c.quadcell.spot_radius > 0.0, "quadcell_spot_radius_rad", "> 0");
    require(std::isfinite(c.quadcell.power_threshold_dbm), "quadcell_threshold_dbm", "finite");
    require(c.fpa.fov > 0.0, "fpa_fov_rad", "> 0");
    require(c.fpa.nea_coeff >= 0.0, "fpa_nea_coeff_rad", ">= 0");
    require(std::isfinite(c.fpa.power_threshold_dbm), "fpa_threshold_dbm", "finite");
    require(c.clcp_rate_hz > 0.0, "clcp_rate_hz", "> 0");

    require(c.gimbal.closed_loop_sigma >= 0.0, "gimbal_closed_loop_sigma_rad", ">= 0");
    require(c.gimbal.open_loop_sigma >= c.gimbal.closed_loop_sigma, "gimbal_open_loop_sigma_rad",
            ">= gimbal_closed_loop_sigma_rad");
    require(c.fsm.residual_sigma >= 0.0, "fsm_residual_sigma_rad", ">= 0");
    require(c.fsm.range > 0.0, "fsm_range_rad", "> 0");

    require(c.atmosphere.visibility_km > 0.0, "visibility_km", "> 0");
    require(c.atmosphere.beam_wander_sigma >= 0.0, "beam_wander_sigma_rad", ">= 0");
    require(c.turbulence.alpha > 0.0, "gg_alpha", "> 0");
    require(c.turbulence.beta > 0.0, "gg_beta", "> 0");
    if (c.rytov_variance) {
        require(*c.rytov_variance > 0.0, "rytov_variance", "> 0");
    }
    require(c.comm_beam.wavelength_nm > 0.0, "wavelength_nm", "> 0");
    require(c.beacon_beam.wavelength_nm > 0.0, "wavelength_nm", "> 0");
    require(c.comm_beam.divergence_full > 0.0, "comm_divergence_rad", "> 0");
    require(c.beacon_beam.divergence_full > 0.0, "beacon_divergence_rad", "> 0");
    require(std::isfinite(c.comm_beam.tx_power_dbm), "comm_tx_power_dbm", "finite");
    require(std::isfinite(c.beacon_beam.tx_power_dbm), "beacon_tx_power_dbm", "finite");
    require(c.gateway_aperture_m > 0.0, "gateway_aperture_m", "> 0");
    require(c.aircraft_aperture_m > 0.0, "aircraft_aperture_m", "> 0");
    require(std::isfinite(c.comm_threshold_dbm), "comm_threshold_dbm", "finite");
    require(c.rho >= 0.0 && c.rho <= 1.0, "rho", "0 <= rho <= 1");
    require(c.ccr.count >= 1, "ccr_count", ">= 1");
    require(c.ccr.ring_radius_m >= 0.0, "ccr_ring_radius_m", ">= 0");
    require(std::isfinite(c.ccr.per_ccr_gain_db), "ccr_gain_db", "finite");

    check_disturbance(c.aircraft_disturbance, "disturbance_gm_sigma_rad", "disturbance_gm_tau_s",
                      "disturbance_jump_rate_hz", "disturbance_jump_min_rad", "disturbance_jump_max_rad");
    check_disturbance(c.gateway_disturbance, "gateway_disturbance_gm_sigma_rad",
                      "gateway_disturbance_gm_tau_s", "gateway_disturbance_jump_rate_hz",
                      "gateway_disturbance_jump_min_rad", "gateway_disturbance_jump_max_rad");

    require(c.scan_overlap > 0.0 && c.scan_overlap <= 1.0, "scan_overlap", "0 < overlap <= 1");
    require(c.max_scan_repeats >= 1, "max_scan_repeats", ">= 1");
    require(c.slot_dt_s > 0.0 && std::isfinite(c.slot_dt_s), "slot_dt_s", "> 0");
    require(c.mission_duration_s >= c.slot_dt_s && std::isfinite(c.mission_duration_s),
            "mission_duration_s", ">= slot_dt_s");
    require(c.aircraft_disturbance.jump_rate * c.slot_dt_s <= 1.0, "disturbance_jump_rate_hz",
            "rate * slot_dt_s <= 1");
}

}  // namespace patsim
