#pragma once

#include <span>

#include "patsim/angle.hpp"
#include "patsim/random.hpp"

// Atmospheric and geometric optical channel models.
//
// Units follow the config file: wavelength in nm, distance and visibility in
// km, apertures in m, angles in rad, powers in dBm and gains in dB.
namespace patsim::channel {

struct BeamSpec {
    double wavelength_nm = 1550.0;
    double divergence_full = 500e-6;  // full angle at 1/e^2 intensity
    double tx_power_dbm = 27.0;
};

/// Gamma-gamma shape pair. An infinite shape collapses that component to 1.
struct TurbulenceParams {
    double alpha = 4.2;
    double beta = 1.4;

    /// 1/alpha + 1/beta + 1/(alpha*beta)
    [[nodiscard]] double scintillation_index() const;
};

struct AtmosphereSpec {
    double visibility_km = 3.0;
    double beam_wander_sigma = 0.0;
};

struct FadePair {
    double up = 1.0;
    double down = 1.0;
};

/// dB per unit of natural-log power ratio, 10/ln(10).
inline constexpr double kDbPerNeper = 4.342944819032518;

/// Kim visibility model: (3.91/V) * (lambda/550)^(-q(V)), in 1/km.
/// Throws std::domain_error for non-positive inputs.
double kim_attenuation_coeff(double visibility_km, double wavelength_nm);

/// Beer-Lambert extinction plus capped geometric spreading, in dB (<= 0).
double link_budget_gain_db(const BeamSpec& beam, double distance_km, double rx_aperture_m,
                           const AtmosphereSpec& atm);

/// Extinction part of link_budget_gain_db alone.
double atmospheric_loss_db(const AtmosphereSpec& atm, double wavelength_nm, double distance_km);

/// On-axis Gaussian beam intensity loss for an angular offset. The angular
/// waist is half the full divergence.
double pointing_loss_db(const Angle2& offset, double divergence_full);

/// Andrews-Phillips plane-wave conversion from Rytov variance.
TurbulenceParams gg_params_from_rytov(double rytov_variance);

void validate(const TurbulenceParams& params);

/// Unit-mean gamma-gamma irradiance sample.
double sample_gg(const TurbulenceParams& params, Rng& rng);

/// Reciprocal up/down irradiance pair. Each marginal is gamma-gamma; both
/// underlying Gamma components are coupled through a Gaussian copula with
/// parameter rho. Always consumes exactly four standard normals.
FadePair sample_gg_correlated(const TurbulenceParams& params, double rho, Rng& rng);

/// Unit-mean Gamma(shape) quantile evaluated at Phi(z). Table-backed for
/// |z| <= 8, exact inverse incomplete gamma beyond.
double unit_gamma_from_normal(double shape, double z);

/// Zero-mean Gaussian beam-path deflection (zero when sigma is 0).
Angle2 sample_beam_wander(const AtmosphereSpec& atm, Rng& rng);

}  // namespace patsim::channel
