#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "patsim/channel.hpp"
#include "patsim/devices.hpp"

using namespace patsim;
using namespace patsim::devices;

namespace {

struct AxisStats {
    double mean_az = 0, mean_el = 0, sd_az = 0, sd_el = 0, mean_norm = 0;
};

template <typename F>
AxisStats axis_stats(int n, F&& draw) {
    double saz = 0, sel = 0, qaz = 0, qel = 0, sn = 0;
    for (int i = 0; i < n; ++i) {
        const Angle2 e = draw();
        saz += e.az;
        sel += e.el;
        qaz += e.az * e.az;
        qel += e.el * e.el;
        sn += e.norm();
    }
    AxisStats s;
    s.mean_az = saz / n;
    s.mean_el = sel / n;
    s.sd_az = std::sqrt(qaz / n - s.mean_az * s.mean_az);
    s.sd_el = std::sqrt(qel / n - s.mean_el * s.mean_el);
    s.mean_norm = sn / n;
    return s;
}

}  // namespace

TEST_CASE("open-loop gimbal") {
    Rng rng = make_stream(1, StreamId::GatewayGimbal);
    const Angle2 target{1e-3, -2e-3};
    CHECK(gimbal_open_loop_point(target, {0.0, 0.0}, rng) == target);

    const GimbalSpec spec{};
    CHECK(spec.open_loop_sigma == 3e-3);
    CHECK(spec.closed_loop_sigma == 0.3e-3);
    const auto s = axis_stats(100'000, [&] { return gimbal_open_loop_point(target, spec, rng) - target; });
    CHECK(s.sd_az == doctest::Approx(3e-3).epsilon(0.02));
    CHECK(s.sd_el == doctest::Approx(3e-3).epsilon(0.02));
    // Rayleigh mean of an isotropic 2-D Gaussian
    CHECK(s.mean_norm == doctest::Approx(3e-3 * std::sqrt(std::numbers::pi / 2.0)).epsilon(0.02));
}

TEST_CASE("closed-loop gimbal") {
    Rng rng = make_stream(2, StreamId::GatewayGimbal);
    CHECK(gimbal_closed_loop_correct({}, {3e-3, 0.0}, rng) == Angle2{});
    const Angle2 offset{2e-3, 1e-3};
    const auto s = axis_stats(100'000, [&] { return offset + gimbal_closed_loop_correct(offset, {}, rng); });
    CHECK(s.sd_az == doctest::Approx(0.3e-3).epsilon(0.02));
    CHECK(s.sd_el == doctest::Approx(0.3e-3).epsilon(0.02));
    CHECK(std::abs(s.mean_az) < 5e-6);
}

TEST_CASE("fsm") {
    Rng rng = make_stream(3, StreamId::GatewayFsm);
    const FsmSpec noiseless{0.0, 4e-3};
    const Angle2 tilt{1e-3, 0.5e-3};
    auto r = fsm_correct({}, tilt, noiseless, rng);
    CHECK(r.tilt == tilt);
    CHECK_FALSE(r.saturated);

    SUBCASE("radial clamp") {
        r = fsm_correct({3e-3, 4e-3}, {}, noiseless, rng);
        CHECK(r.saturated);
        CHECK(r.tilt.norm() == doctest::Approx(4e-3));
        CHECK(r.tilt.az / r.tilt.el == doctest::Approx(0.75));
    }

    SUBCASE("residual statistics") {
        const FsmSpec spec{};
        CHECK(spec.residual_sigma == 100e-6);
        const auto s = axis_stats(100'000, [&] { return fsm_correct({1e-3, 0.0}, {}, spec, rng).tilt - Angle2{1e-3, 0.0}; });
        CHECK(s.sd_az == doctest::Approx(100e-6).epsilon(0.02));
        CHECK(s.sd_el == doctest::Approx(100e-6).epsilon(0.02));
        for (int i = 0; i < 10'000; ++i) {
            const auto big = fsm_correct({1.0, 1.0}, {}, spec, rng);
            REQUIRE(big.tilt.norm() <= spec.range + 3.0 * std::sqrt(2.0) * 4.0 * spec.residual_sigma);
        }
    }
}

TEST_CASE("nea") {
    CHECK(nea_sigma(100.0, 1e-3) == doctest::Approx(100e-6));
    CHECK(nea_sigma(400.0, 1e-3) == doctest::Approx(0.5 * nea_sigma(100.0, 1e-3)));
    CHECK(nea_sigma(1e300, 1e-3) < 1e-150);
    CHECK_THROWS_AS(nea_sigma(0.0, 1e-3), std::domain_error);
    CHECK(snr_over_threshold(-40.0, -40.0) == 1.0);
    CHECK(snr_over_threshold(-20.0, -40.0) == doctest::Approx(100.0));
}

TEST_CASE("quadcell") {
    Rng rng = make_stream(4, StreamId::GatewayQuadcell);
    const QuadcellSpec spec{};
    CHECK(spec.fov == 2e-3);

    SUBCASE("zero offset has zero bias") {
        const QuadcellSpec quiet{2e-3, 0.0, -40.0, 2e-3};
        const auto r = quadcell_measure({}, 0.0, quiet, rng);
        CHECK(r.ok());
        CHECK(r.measured == Angle2{});
    }

    SUBCASE("outcomes") {
        CHECK(quadcell_measure({2.1e-3, 0.0}, 0.0, spec, rng).outcome == QuadcellOutcome::OutOfFov);
        CHECK(quadcell_measure({1.5e-3, 1.5e-3}, 0.0, spec, rng).outcome == QuadcellOutcome::OutOfFov);
        CHECK(quadcell_measure({0.1e-3, 0.0}, -41.0, spec, rng).outcome == QuadcellOutcome::LowPower);
        // field of view is checked first
        CHECK(quadcell_measure({3e-3, 0.0}, -80.0, spec, rng).outcome == QuadcellOutcome::OutOfFov);
    }

    SUBCASE("linear inverse matches the response slope at the origin") {
        const double x = 1e-9;
        const Angle2 s = quadcell_response({x, -x}, spec.spot_radius);
        const Angle2 back = quadcell_linear_inverse(s, spec.spot_radius);
        CHECK(back.az == doctest::Approx(x).epsilon(1e-9));
        CHECK(back.el == doctest::Approx(-x).epsilon(1e-9));
    }

    SUBCASE("nonlinearity bias grows with offset") {
        const QuadcellSpec quiet{2e-3, 0.0, -40.0, 2e-3};
        double prev = 0.0;
        for (int i = 1; i < 200; ++i) {
            const double x = 2e-3 * i / 200.0;
            const auto r = quadcell_measure({x, 0.0}, 0.0, quiet, rng);
            // independent evaluation: w*sqrt(pi/8)*erf(sqrt2 x/w) - x
            const double expect = 2e-3 * std::sqrt(std::numbers::pi / 8.0) * std::erf(std::sqrt(2.0) * x / 2e-3) - x;
            CHECK(r.measured.az - x == doctest::Approx(expect).epsilon(1e-9));
            const double bias = std::abs(r.measured.az - x);
            CHECK(bias > prev);
            prev = bias;
        }
    }

    SUBCASE("nea statistics") {
        const double p = -30.0;  // 10 dB over threshold
        const auto s = axis_stats(100'000, [&] { return quadcell_measure({}, p, spec, rng).measured; });
        const double expect = spec.nea_coeff / std::sqrt(10.0);
        CHECK(s.sd_az == doctest::Approx(expect).epsilon(0.02));
        CHECK(s.sd_el == doctest::Approx(expect).epsilon(0.02));
    }
}

TEST_CASE("fpa") {
    Rng rng = make_stream(5, StreamId::GatewayFpa);
    const FpaSpec spec{};
    CHECK(spec.fov == 40e-3);
    CHECK(fpa_detect({30e-3, 10e-3}, -30.0, spec, rng).detected);
    CHECK_FALSE(fpa_detect({50e-3, 0.0}, -30.0, spec, rng).detected);
    CHECK_FALSE(fpa_detect({}, -46.0, spec, rng).detected);
    CHECK(fpa_sees({}, -45.0, spec));

    const double p = -25.0;  // SNR 100
    const Angle2 truth{5e-3, -3e-3};
    const auto s = axis_stats(100'000, [&] { return fpa_detect(truth, p, spec, rng).measured - truth; });
    CHECK(s.sd_az == doctest::Approx(spec.nea_coeff / 10.0).epsilon(0.02));
    CHECK(std::abs(s.mean_az) < 1e-6);
}

TEST_CASE("ccr return") {
    Rng rng = make_stream(6, StreamId::CcrFade);
    const channel::TurbulenceParams tp{4.2, 1.4};

    SUBCASE("unit fades give the per-ccr gain") {
        const CcrArraySpec spec{};
        const std::vector<channel::FadePair> ones(4);
        const auto r = ccr_return_gain(spec, ones, {1e-3, 2e-3});
        CHECK(r.gain == doctest::Approx(0.1).epsilon(1e-12));
        CHECK(r.return_offset == Angle2{1e-3, 2e-3});
    }

    SUBCASE("count mismatch") {
        const std::vector<channel::FadePair> three(3);
        CHECK_THROWS_AS(ccr_return_gain(CcrArraySpec{}, three, {}), std::domain_error);
    }

    SUBCASE("single ccr with rho 1 is the squared fade") {
        const CcrArraySpec one{1, 0.15, -10.0};
        Rng a = make_stream(7, StreamId::CcrFade);
        Rng b = make_stream(7, StreamId::CcrFade);
        for (int i = 0; i < 1000; ++i) {
            const auto f = channel::sample_gg_correlated(tp, 1.0, a);
            const auto g = channel::sample_gg_correlated(tp, 1.0, b);
            const std::vector<channel::FadePair> v{f};
            CHECK(ccr_return_gain(one, v, {}).gain == doctest::Approx(0.1 * g.up * g.up).epsilon(1e-12));
        }
    }

    auto relvar = [&](int count, double rho, double* mean_out) {
        const CcrArraySpec spec{count, 0.15, 0.0};
        const int n = 1'000'000;
        double s = 0, q = 0;
        std::vector<channel::FadePair> fades(static_cast<std::size_t>(count));
        for (int i = 0; i < n; ++i) {
            for (auto& f : fades) {
                f = channel::sample_gg_correlated(tp, rho, rng);
            }
            const double g = ccr_return_gain(spec, fades, {}).gain;
            s += g;
            q += g * g;
        }
        const double m = s / n;
        if (mean_out) {
            *mean_out = m;
        }
        return (q / n - m * m) / (m * m);
    };

    SUBCASE("diversity quarters the relative variance") {
        double m1 = 0, m4 = 0;
        const double v1 = relvar(1, 0.0, &m1);
        const double v4 = relvar(4, 0.0, &m4);
        CHECK(v4 / v1 == doctest::Approx(0.25).epsilon(0.05));
        CHECK(m1 == doctest::Approx(1.0).epsilon(0.01));
        CHECK(m4 == doctest::Approx(1.0).epsilon(0.01));
    }

    SUBCASE("mean follows the product moment for correlated pairs") {
        // E[I_up I_down] estimated separately from the gain computation
        Rng other = make_stream(8, StreamId::CcrFade);
        double prod = 0;
        const int n = 1'000'000;
        for (int i = 0; i < n; ++i) {
            const auto f = channel::sample_gg_correlated(tp, 0.7, other);
            prod += f.up * f.down;
        }
        double m = 0;
        relvar(4, 0.7, &m);
        CHECK(m == doctest::Approx(prod / n).epsilon(0.01));
        CHECK(m > 1.05);
    }
}

TEST_CASE("positioning") {
    Rng rng = make_stream(9, StreamId::Aoa);
    CHECK(aoa_estimate({1e-3, 1e-3}, {5.0, 0.0}, rng) == Angle2{1e-3, 1e-3});
    const PositioningSpec spec{};
    const auto s = axis_stats(100'000, [&] { return aoa_estimate({}, spec, rng); });
    CHECK(s.sd_az == doctest::Approx(1e-3).epsilon(0.02));
    CHECK(std::abs(s.mean_az) < 1e-5);
    CHECK(std::abs(s.mean_el) < 1e-5);

    CHECK(gnss_angle_sigma(5.0, 2.0) == doctest::Approx(2.5e-3));
}

TEST_CASE("fusion") {
    const auto f = fuse_estimates({1e-3, 0.0}, 2.5e-3, {0.0, 0.0}, 1e-3);
    CHECK(f.sigma == doctest::Approx(0.0009284766908852594).epsilon(1e-12));
    CHECK(f.sigma < 1e-3);
    // weights 1/6.25 : 1/1
    CHECK(f.angle.az == doctest::Approx(1e-3 * 1.0 / 7.25).epsilon(1e-12));

    const double inf = std::numeric_limits<double>::infinity();
    CHECK(fuse_estimates({1e-3, 0.0}, 2.5e-3, {5e-3, 0.0}, inf).angle == Angle2{1e-3, 0.0});
    CHECK(fuse_estimates({1e-3, 0.0}, inf, {5e-3, 0.0}, 1e-3).sigma == 1e-3);
    CHECK_THROWS_AS(fuse_estimates({}, 0.0, {}, 1e-3), std::domain_error);
    CHECK_THROWS_AS(fuse_estimates({}, 1e-3, {}, -1.0), std::domain_error);

    SUBCASE("empirical sigma") {
        Rng g = make_stream(10, StreamId::Gnss);
        Rng a = make_stream(10, StreamId::Aoa);
        const auto s = axis_stats(100'000, [&] {
            return fuse_estimates(draw_angle2(g, 2.5e-3), 2.5e-3, draw_angle2(a, 1e-3), 1e-3).angle;
        });
        CHECK(s.sd_az == doctest::Approx(0.9285e-3).epsilon(0.02));
    }
}
