#pragma once

#include <span>

#include "patsim/angle.hpp"
#include "patsim/channel.hpp"
#include "patsim/random.hpp"

// Stochastic models of the PAT hardware. Every model degenerates to the ideal
// map when its noise parameters are zero.
namespace patsim::devices {

struct GimbalSpec {
    double open_loop_sigma = 3e-3;
    double closed_loop_sigma = 0.3e-3;
};

struct FsmSpec {
    double residual_sigma = 100e-6;
    double range = 4e-3;  // max |tilt|
};

struct QuadcellSpec {
    double fov = 2e-3;           // half-angle
    double nea_coeff = 0.5e-3;   // rad * sqrt(SNR)
    double power_threshold_dbm = -40.0;
    double spot_radius = 2e-3;   // 1/e^2 radius of the focused spot, in sky angle
};

struct FpaSpec {
    double fov = 40e-3;  // half-angle
    double nea_coeff = 0.3e-3;
    double power_threshold_dbm = -45.0;
};

struct CcrArraySpec {
    int count = 4;
    double ring_radius_m = 0.15;
    double per_ccr_gain_db = -10.0;
};

struct PositioningSpec {
    double gnss_sigma_m = 5.0;
    double aoa_sigma = 1e-3;
};

enum class QuadcellOutcome { Tracking, OutOfFov, LowPower };

struct QuadcellReading {
    QuadcellOutcome outcome = QuadcellOutcome::Tracking;
    Angle2 measured;

    [[nodiscard]] bool ok() const { return outcome == QuadcellOutcome::Tracking; }
};

struct FpaReading {
    bool detected = false;
    Angle2 measured;
};

struct FsmResult {
    Angle2 tilt;
    bool saturated = false;
};

struct CcrReturn {
    double gain = 0.0;      // linear
    Angle2 return_offset;   // direction of the returned beam at the gateway
};

struct FusedEstimate {
    Angle2 angle;
    double sigma = 0.0;
};

Angle2 gimbal_open_loop_point(const Angle2& target, const GimbalSpec& spec, Rng& rng);

/// Correction that cancels `measured_offset`, with closed-loop residual noise.
Angle2 gimbal_closed_loop_correct(const Angle2& measured_offset, const GimbalSpec& spec, Rng& rng);

/// Adds `command` to the current tilt, clamps radially to the mirror range,
/// then applies the residual control error.
FsmResult fsm_correct(const Angle2& command, const Angle2& state_tilt, const FsmSpec& spec, Rng& rng);

double nea_sigma(double snr_linear, double nea_coeff);

/// Detector SNR referenced to its power threshold (SNR = 1 at threshold).
double snr_over_threshold(double rx_power_dbm, double threshold_dbm);

/// Normalized quadrant difference signal of a Gaussian spot, per axis:
/// erf(sqrt(2) x / spot_radius).
Angle2 quadcell_response(const Angle2& offset, double spot_radius);

/// Small-angle linear inverse of quadcell_response.
Angle2 quadcell_linear_inverse(const Angle2& signal, double spot_radius);

QuadcellReading quadcell_measure(const Angle2& true_offset, double rx_power_dbm,
                                 const QuadcellSpec& spec, Rng& rng);

FpaReading fpa_detect(const Angle2& true_dir_offset, double rx_power_dbm, const FpaSpec& spec, Rng& rng);

/// Geometry-and-power detection test of the FPA, without measurement noise.
bool fpa_sees(const Angle2& true_dir_offset, double rx_power_dbm, const FpaSpec& spec);

/// Diversity return of the retroreflector array. `fades` holds one
/// (uplink, downlink) irradiance pair per CCR; throws std::domain_error when
/// its size differs from spec.count.
CcrReturn ccr_return_gain(const CcrArraySpec& spec, std::span<const channel::FadePair> fades,
                          const Angle2& incident_offset);

Angle2 aoa_estimate(const Angle2& true_angle, const PositioningSpec& spec, Rng& rng);

/// Angular sigma of a GNSS position error seen from `distance_km`.
double gnss_angle_sigma(double gnss_sigma_m, double distance_km);

/// Per-axis inverse-variance (maximum likelihood) combination.
FusedEstimate fuse_estimates(const Angle2& gnss_angle, double gnss_sigma, const Angle2& aoa_angle,
                             double aoa_sigma);

}  // namespace patsim::devices
