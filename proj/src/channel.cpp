#include "patsim/channel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

namespace patsim::channel {

namespace {

void require_positive(double v, const char* what) {
    if (!(v > 0.0)) {
        throw std::domain_error(std::string(what) + " must be positive");
    }
}

double kim_exponent(double visibility_km) {
    if (visibility_km > 50.0) {
        return 1.6;
    }
    if (visibility_km > 6.0) {
        return 1.3;
    }
    if (visibility_km > 1.0) {
        return 0.16 * visibility_km + 0.34;
    }
    if (visibility_km > 0.5) {
        return visibility_km - 0.5;
    }
    return 0.0;
}

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double gamma_quantile_at_normal(double shape, double z) {
    // Use the complementary form in the upper half to keep precision near 1.
    if (z <= 0.0) {
        return boost::math::gamma_p_inv(shape, std_normal_cdf(z));
    }
    return boost::math::gamma_q_inv(shape, std_normal_cdf(-z));
}

// log of the Gamma(shape, 1) quantile tabulated over the normal score. log G
// is smooth in z on both tails, so linear interpolation is accurate to ~1e-6
// relative at this step.
class GammaQuantileTable {
public:
    static constexpr double kZMax = 8.0;
    static constexpr int kStepsPerUnit = 512;

    explicit GammaQuantileTable(double shape) : shape_(shape) {
        const int n = static_cast<int>(2 * kZMax * kStepsPerUnit) + 1;
        log_q_.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const double z = -kZMax + static_cast<double>(i) / kStepsPerUnit;
            log_q_[static_cast<std::size_t>(i)] = std::log(gamma_quantile_at_normal(shape, z));
        }
    }

    [[nodiscard]] double quantile(double z) const {
        if (!(std::abs(z) < kZMax)) {
            return gamma_quantile_at_normal(shape_, z);
        }
        const double pos = (z + kZMax) * kStepsPerUnit;
        const auto i = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(i);
        return std::exp(log_q_[i] + frac * (log_q_[i + 1] - log_q_[i]));
    }

private:
    double shape_;
    std::vector<double> log_q_;
};

const GammaQuantileTable& table_for(double shape) {
    static std::mutex mu;
    static std::map<double, std::unique_ptr<GammaQuantileTable>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[shape];
    if (!slot) {
        slot = std::make_unique<GammaQuantileTable>(shape);
    }
    return *slot;
}

double unit_gamma(double shape, Rng& rng) {
    if (std::isinf(shape)) {
        return 1.0;
    }
    return std::gamma_distribution<double>{shape, 1.0 / shape}(rng);
}

}  // namespace

double TurbulenceParams::scintillation_index() const {
    return 1.0 / alpha + 1.0 / beta + 1.0 / (alpha * beta);
}

double kim_attenuation_coeff(double visibility_km, double wavelength_nm) {
    require_positive(visibility_km, "visibility");
    require_positive(wavelength_nm, "wavelength");
    if (std::isinf(visibility_km)) {
        return 0.0;
    }
    return (3.91 / visibility_km) * std::pow(wavelength_nm / 550.0, -kim_exponent(visibility_km));
}

double atmospheric_loss_db(const AtmosphereSpec& atm, double wavelength_nm, double distance_km) {
    require_positive(distance_km, "distance");
    return -kDbPerNeper * kim_attenuation_coeff(atm.visibility_km, wavelength_nm) * distance_km;
}

double link_budget_gain_db(const BeamSpec& beam, double distance_km, double rx_aperture_m,
                           const AtmosphereSpec& atm) {
    require_positive(distance_km, "distance");
    require_positive(rx_aperture_m, "rx aperture");
    require_positive(beam.divergence_full, "beam divergence");
    const double footprint_m = beam.divergence_full * distance_km * 1000.0;
    const double geometric = std::min(0.0, 20.0 * std::log10(rx_aperture_m / footprint_m));
    return atmospheric_loss_db(atm, beam.wavelength_nm, distance_km) + geometric;
}

double pointing_loss_db(const Angle2& offset, double divergence_full) {
    require_positive(divergence_full, "beam divergence");
    const double w = 0.5 * divergence_full;
    // 10*log10(exp(-2 r^2 / w^2)) without underflowing for large offsets.
    return -2.0 * kDbPerNeper * offset.norm_sq() / (w * w);
}

TurbulenceParams gg_params_from_rytov(double rytov_variance) {
    require_positive(rytov_variance, "rytov variance");
    const double s2 = rytov_variance;
    const double s125 = std::pow(s2, 6.0 / 5.0);  // sigma^(12/5)
    const double large = 0.49 * s2 / std::pow(1.0 + 1.11 * s125, 7.0 / 6.0);
    const double small = 0.51 * s2 / std::pow(1.0 + 0.69 * s125, 5.0 / 6.0);
    return {1.0 / std::expm1(large), 1.0 / std::expm1(small)};
}

void validate(const TurbulenceParams& params) {
    if (!(params.alpha > 0.0) || !(params.beta > 0.0)) {
        throw std::domain_error("gamma-gamma shapes must be positive");
    }
}

double sample_gg(const TurbulenceParams& params, Rng& rng) {
    const double x = unit_gamma(params.alpha, rng);
    const double y = unit_gamma(params.beta, rng);
    return x * y;
}

double unit_gamma_from_normal(double shape, double z) {
    if (std::isinf(shape)) {
        return 1.0;
    }
    return table_for(shape).quantile(z) / shape;
}

FadePair sample_gg_correlated(const TurbulenceParams& params, double rho, Rng& rng) {
    if (!(rho >= 0.0 && rho <= 1.0)) {
        throw std::domain_error("correlation coefficient must lie in [0, 1]");
    }
    const double c = std::sqrt(1.0 - rho * rho);
    const double z1 = draw_normal(rng);
    const double z2 = draw_normal(rng);
    const double z3 = draw_normal(rng);
    const double z4 = draw_normal(rng);
    const double za = rho * z1 + c * z2;
    const double zb = rho * z3 + c * z4;
    return {unit_gamma_from_normal(params.alpha, z1) * unit_gamma_from_normal(params.beta, z3),
            unit_gamma_from_normal(params.alpha, za) * unit_gamma_from_normal(params.beta, zb)};
}

Angle2 sample_beam_wander(const AtmosphereSpec& atm, Rng& rng) {
    return draw_angle2(rng, atm.beam_wander_sigma);
}

}  // namespace patsim::channel
