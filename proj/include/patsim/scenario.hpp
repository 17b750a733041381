#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "patsim/channel.hpp"
#include "patsim/devices.hpp"
#include "patsim/pat_types.hpp"

namespace patsim {

/// Invalid or unparsable configuration. `field()` names the offending key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}

    [[nodiscard]] const std::string& field() const { return field_; }

private:
    std::string field_;
};

/// Every parameter of one simulated mission. Defaults reproduce the reference
/// scenario: a 2 km ground-to-aircraft link at 3 km visibility under strong
/// turbulence.
struct ScenarioConfig {
    // geometry and positioning
    double link_distance_km = 2.0;
    devices::PositioningSpec positioning{};

    // detectors and actuators
    devices::QuadcellSpec quadcell{};
    devices::FpaSpec fpa{};
    double clcp_rate_hz = 1.0;
    devices::GimbalSpec gimbal{};
    devices::FsmSpec fsm{};

    // channel
    channel::AtmosphereSpec atmosphere{};
    channel::TurbulenceParams turbulence{};
    std::optional<double> rytov_variance;  // overrides turbulence when set
    channel::BeamSpec comm_beam{1550.0, 500e-6, 27.0};
    channel::BeamSpec beacon_beam{1550.0, 5e-3, 30.0};
    double gateway_aperture_m = 0.1;
    double aircraft_aperture_m = 0.05;
    double comm_threshold_dbm = -35.0;
    double rho = 0.4;
    devices::CcrArraySpec ccr{};

    // platform motion
    DisturbanceSpec aircraft_disturbance{};
    DisturbanceSpec gateway_disturbance = DisturbanceSpec::none();

    // acquisition
    double scan_overlap = 1.0;
    int max_scan_repeats = 3;

    // run control
    AlgorithmVariant variant = AlgorithmVariant::Proposed;
    double mission_duration_s = 1800.0;
    double slot_dt_s = 0.1;
    std::uint64_t seed = 1;

    /// Gamma-gamma parameters in effect (rytov_variance wins when present).
    [[nodiscard]] channel::TurbulenceParams effective_turbulence() const;

    [[nodiscard]] long slot_count() const;
    [[nodiscard]] int clcp_period_slots() const;
};

/// Throws ConfigError naming the first field that violates its constraint.
void validate(const ScenarioConfig& cfg);

}  // namespace patsim
