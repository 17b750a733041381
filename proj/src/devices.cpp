#include "patsim/devices.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace patsim::devices {

Angle2 gimbal_open_loop_point(const Angle2& target, const GimbalSpec& spec, Rng& rng) {
    return target + draw_angle2(rng, spec.open_loop_sigma);
}

Angle2 gimbal_closed_loop_correct(const Angle2& measured_offset, const GimbalSpec& spec, Rng& rng) {
    return -measured_offset + draw_angle2(rng, spec.closed_loop_sigma);
}

FsmResult fsm_correct(const Angle2& command, const Angle2& state_tilt, const FsmSpec& spec, Rng& rng) {
    FsmResult out;
    out.tilt = state_tilt + command;
    out.saturated = clamp_radial(out.tilt, spec.range);
    out.tilt += draw_angle2(rng, spec.residual_sigma);
    return out;
}

double nea_sigma(double snr_linear, double nea_coeff) {
    if (!(snr_linear > 0.0)) {
        throw std::domain_error("SNR must be positive");
    }
    return nea_coeff / std::sqrt(snr_linear);
}

double snr_over_threshold(double rx_power_dbm, double threshold_dbm) {
    return std::pow(10.0, (rx_power_dbm - threshold_dbm) / 10.0);
}

Angle2 quadcell_response(const Angle2& offset, double spot_radius) {
    const double k = std::numbers::sqrt2 / spot_radius;
    return {std::erf(k * offset.az), std::erf(k * offset.el)};
}

Angle2 quadcell_linear_inverse(const Angle2& signal, double spot_radius) {
    // Inverse of the response slope at the origin, 2*sqrt(2)/(sqrt(pi)*w).
    const double gain = spot_radius * std::sqrt(std::numbers::pi / 8.0);
    return gain * signal;
}

QuadcellReading quadcell_measure(const Angle2& true_offset, double rx_power_dbm,
                                 const QuadcellSpec& spec, Rng& rng) {
    if (true_offset.norm() > spec.fov) {
        return {QuadcellOutcome::OutOfFov, {}};
    }
    if (rx_power_dbm < spec.power_threshold_dbm) {
        return {QuadcellOutcome::LowPower, {}};
    }
    const Angle2 estimate =
        quadcell_linear_inverse(quadcell_response(true_offset, spec.spot_radius), spec.spot_radius);
    const double sigma =
        nea_sigma(snr_over_threshold(rx_power_dbm, spec.power_threshold_dbm), spec.nea_coeff);
    return {QuadcellOutcome::Tracking, estimate + draw_angle2(rng, sigma)};
}

bool fpa_sees(const Angle2& true_dir_offset, double rx_power_dbm, const FpaSpec& spec) {
    return true_dir_offset.norm() <= spec.fov && rx_power_dbm >= spec.power_threshold_dbm;
}

FpaReading fpa_detect(const Angle2& true_dir_offset, double rx_power_dbm, const FpaSpec& spec, Rng& rng) {
    if (!fpa_sees(true_dir_offset, rx_power_dbm, spec)) {
        return {false, {}};
    }
    const double sigma =
        nea_sigma(snr_over_threshold(rx_power_dbm, spec.power_threshold_dbm), spec.nea_coeff);
    return {true, true_dir_offset + draw_angle2(rng, sigma)};
}

CcrReturn ccr_return_gain(const CcrArraySpec& spec, std::span<const channel::FadePair> fades,
                          const Angle2& incident_offset) {
    if (spec.count < 1 || fades.size() != static_cast<std::size_t>(spec.count)) {
        throw std::domain_error("one fade pair is required per retroreflector");
    }
    double sum = 0.0;
    for (const auto& f : fades) {
        sum += f.up * f.down;
    }
    const double per_ccr = std::pow(10.0, spec.per_ccr_gain_db / 10.0);
    // A corner cube returns light along its incidence direction, so the
    // aircraft attitude never enters the return geometry.
    return {per_ccr * sum / static_cast<double>(spec.count), incident_offset};
}

Angle2 aoa_estimate(const Angle2& true_angle, const PositioningSpec& spec, Rng& rng) {
    return true_angle + draw_angle2(rng, spec.aoa_sigma);
}

double gnss_angle_sigma(double gnss_sigma_m, double distance_km) {
    return gnss_sigma_m / (distance_km * 1000.0);
}

FusedEstimate fuse_estimates(const Angle2& gnss_angle, double gnss_sigma, const Angle2& aoa_angle,
                             double aoa_sigma) {
    if (!(gnss_sigma > 0.0) || !(aoa_sigma > 0.0)) {
        throw std::domain_error("fusion sigmas must be positive");
    }
    if (std::isinf(aoa_sigma)) {
        return {gnss_angle, gnss_sigma};
    }
    if (std::isinf(gnss_sigma)) {
        return {aoa_angle, aoa_sigma};
    }
    const double vg = gnss_sigma * gnss_sigma;
    const double va = aoa_sigma * aoa_sigma;
    const double wg = va / (vg + va);
    const double wa = vg / (vg + va);
    return {wg * gnss_angle + wa * aoa_angle, gnss_sigma * aoa_sigma / std::sqrt(vg + va)};
}

}  // namespace patsim::devices
