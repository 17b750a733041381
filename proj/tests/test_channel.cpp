#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "gg_oracle.hpp"
#include "patsim/channel.hpp"

using namespace patsim;
using namespace patsim::channel;

namespace {

struct Moments {
    double mean = 0.0;
    double var = 0.0;
};

Moments moments(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) {
        s += x;
    }
    const double m = s / static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) {
        ss += (x - m) * (x - m);
    }
    return {m, ss / static_cast<double>(xs.size() - 1)};
}

double pearson(const std::vector<FadePair>& ps) {
    double su = 0, sd = 0;
    for (const auto& p : ps) {
        su += p.up;
        sd += p.down;
    }
    const double n = static_cast<double>(ps.size());
    const double mu = su / n, md = sd / n;
    double cov = 0, vu = 0, vd = 0;
    for (const auto& p : ps) {
        cov += (p.up - mu) * (p.down - md);
        vu += (p.up - mu) * (p.up - mu);
        vd += (p.down - md) * (p.down - md);
    }
    return cov / std::sqrt(vu * vd);
}

}  // namespace

TEST_CASE("kim attenuation") {
    CHECK(kim_attenuation_coeff(3.0, 1550.0) == doctest::Approx(0.5572895706475437).epsilon(1e-12));
    CHECK(kDbPerNeper * kim_attenuation_coeff(3.0, 1550.0) == doctest::Approx(2.4203).epsilon(1e-4));
    CHECK(kim_attenuation_coeff(0.2, 1550.0) == doctest::Approx(19.55).epsilon(1e-12));
    CHECK(kDbPerNeper * kim_attenuation_coeff(0.2, 1550.0) == doctest::Approx(84.9046).epsilon(1e-5));
    CHECK(kim_attenuation_coeff(std::numeric_limits<double>::infinity(), 1550.0) == 0.0);
    CHECK(kim_attenuation_coeff(1e6, 1550.0) < 1e-5);

    SUBCASE("q regimes") {
        // 3.91/V * (lambda/550)^-q, evaluated per regime
        const double r = 1550.0 / 550.0;
        CHECK(kim_attenuation_coeff(60.0, 1550.0) == doctest::Approx(3.91 / 60.0 * std::pow(r, -1.6)));
        CHECK(kim_attenuation_coeff(10.0, 1550.0) == doctest::Approx(3.91 / 10.0 * std::pow(r, -1.3)));
        CHECK(kim_attenuation_coeff(0.8, 1550.0) == doctest::Approx(3.91 / 0.8 * std::pow(r, -0.3)));
    }

    SUBCASE("strictly decreasing in visibility") {
        double prev = std::numeric_limits<double>::infinity();
        for (double v = 0.05; v < 80.0; v *= 1.01) {
            const double k = kim_attenuation_coeff(v, 1550.0);
            CHECK(k < prev);
            prev = k;
        }
    }

    SUBCASE("domain") {
        CHECK_THROWS_AS(kim_attenuation_coeff(0.0, 1550.0), std::domain_error);
        CHECK_THROWS_AS(kim_attenuation_coeff(-1.0, 1550.0), std::domain_error);
        CHECK_THROWS_AS(kim_attenuation_coeff(3.0, 0.0), std::domain_error);
    }
}

TEST_CASE("link budget gain") {
    const BeamSpec comm{1550.0, 500e-6, 27.0};
    const AtmosphereSpec atm{3.0, 0.0};
    CHECK(link_budget_gain_db(comm, 2.0, 0.1, atm) == doctest::Approx(-24.840555707089212).epsilon(1e-12));
    CHECK(atmospheric_loss_db(atm, 1550.0, 2.0) == doctest::Approx(-4.840555707089212).epsilon(1e-12));

    SUBCASE("capture cap") {
        const BeamSpec narrow{1550.0, 10e-6, 0.0};
        CHECK(link_budget_gain_db(narrow, 2.0, 0.1, atm) == doctest::Approx(atmospheric_loss_db(atm, 1550.0, 2.0)));
    }
    SUBCASE("extinction linear in distance") {
        CHECK(atmospheric_loss_db(atm, 1550.0, 4.0) == doctest::Approx(2.0 * atmospheric_loss_db(atm, 1550.0, 2.0)));
    }
    SUBCASE("monotone and non-positive") {
        double prev = 0.0;
        for (double z = 0.01; z < 20.0; z *= 1.1) {
            const double g = link_budget_gain_db(comm, z, 0.1, atm);
            CHECK(g <= 0.0);
            CHECK(g <= prev);
            prev = g;
        }
    }
}

TEST_CASE("pointing loss") {
    CHECK(pointing_loss_db({}, 500e-6) == 0.0);
    CHECK(pointing_loss_db({250e-6, 0.0}, 500e-6) == doctest::Approx(-8.685889638065037).epsilon(1e-12));
    CHECK(pointing_loss_db({0.0, 2.5e-3}, 5e-3) == doctest::Approx(-8.685889638065037).epsilon(1e-12));
    const Angle2 o{1e-4, -2e-4};
    CHECK(pointing_loss_db(o, 500e-6) == pointing_loss_db(-o, 500e-6));
    double prev = 1.0;
    for (double r = 0.0; r < 1e-3; r += 1e-5) {
        const double l = pointing_loss_db({r, 0.0}, 500e-6);
        CHECK(l < prev);
        prev = l;
    }
}

TEST_CASE("rytov conversion") {
    const auto p4 = gg_params_from_rytov(4.0);
    CHECK(p4.alpha == doctest::Approx(4.340662543326943).epsilon(1e-12));
    CHECK(p4.beta == doctest::Approx(1.3088026792833825).epsilon(1e-12));

    // Plane-wave scintillation index, closed form.
    const double s2 = 1.0;
    const double si_closed = std::exp(0.49 * s2 / std::pow(1 + 1.11 * std::pow(s2, 1.2), 7.0 / 6.0) +
                                      0.51 * s2 / std::pow(1 + 0.69 * std::pow(s2, 1.2), 5.0 / 6.0)) -
                             1.0;
    const auto p1 = gg_params_from_rytov(s2);
    CHECK(p1.scintillation_index() == doctest::Approx(si_closed).epsilon(1e-12));
    CHECK(std::abs(p1.scintillation_index() - si_closed) / si_closed < 0.25);

    const auto weak = gg_params_from_rytov(1e-4);
    CHECK(weak.alpha > 1e3);
    CHECK(weak.beta > 1e3);
    CHECK(weak.scintillation_index() == doctest::Approx(1e-4).epsilon(0.01));

    CHECK_THROWS_AS(gg_params_from_rytov(0.0), std::domain_error);
    CHECK_THROWS_AS(gg_params_from_rytov(-1.0), std::domain_error);
}

TEST_CASE("gamma-gamma sampler") {
    const TurbulenceParams p{4.2, 1.4};
    CHECK(p.scintillation_index() == doctest::Approx(1.1224489795918366).epsilon(1e-12));

    Rng rng = make_stream(11, StreamId::UplinkBeaconFade);
    std::vector<double> xs(1'000'000);
    for (auto& x : xs) {
        x = sample_gg(p, rng);
        REQUIRE(x > 0.0);
    }
    const auto m = moments(xs);
    CHECK(std::abs(m.mean - 1.0) < 0.01);
    CHECK(std::abs(m.var - 1.1224489795918366) / 1.1224489795918366 < 0.03);

    SUBCASE("KS against the analytic CDF") {
        std::vector<double> sample(xs.begin(), xs.begin() + 100'000);
        const testing::GgCdf cdf(p.alpha, p.beta);
        CHECK(testing::ks_distance(sample, cdf) < 0.01);
    }

    SUBCASE("degenerate limit") {
        const TurbulenceParams flat{std::numeric_limits<double>::infinity(),
                                    std::numeric_limits<double>::infinity()};
        CHECK(sample_gg(flat, rng) == 1.0);
        const TurbulenceParams near{1e7, 1e7};
        CHECK(sample_gg(near, rng) == doctest::Approx(1.0).epsilon(0.01));
    }
}

TEST_CASE("unit gamma from normal score") {
    // Table lookups against the exact inverse across the table range.
    for (double shape : {1.4, 4.2, 0.7}) {
        for (double z = -7.9; z < 7.9; z += 0.37) {
            const double exact = testing::unit_gamma_quantile(shape, z);
            CHECK(unit_gamma_from_normal(shape, z) == doctest::Approx(exact).epsilon(1e-6));
        }
        CHECK(unit_gamma_from_normal(shape, 9.0) == doctest::Approx(testing::unit_gamma_quantile(shape, 9.0)));
    }
}

TEST_CASE("correlated sampler") {
    const TurbulenceParams p{4.2, 1.4};
    Rng rng = make_stream(5, StreamId::CcrFade);

    SUBCASE("rho = 1 gives identical samples") {
        for (int i = 0; i < 10'000; ++i) {
            const auto f = sample_gg_correlated(p, 1.0, rng);
            REQUIRE(f.up == f.down);
        }
    }

    SUBCASE("rho = 0 is uncorrelated, marginals unit mean") {
        std::vector<FadePair> ps(1'000'000);
        for (auto& f : ps) {
            f = sample_gg_correlated(p, 0.0, rng);
        }
        CHECK(std::abs(pearson(ps)) < 0.01);
    }

    SUBCASE("marginals survive the copula") {
        for (double rho : {0.4, 0.7}) {
            std::vector<double> up, down;
            for (int i = 0; i < 400'000; ++i) {
                const auto f = sample_gg_correlated(p, rho, rng);
                up.push_back(f.up);
                down.push_back(f.down);
            }
            CHECK(std::abs(moments(up).mean - 1.0) < 0.01);
            CHECK(std::abs(moments(down).mean - 1.0) < 0.01);
            const testing::GgCdf cdf(p.alpha, p.beta);
            up.resize(100'000);
            CHECK(testing::ks_distance(up, cdf) < 0.01);
        }
    }

    SUBCASE("product variance increases with rho") {
        double prev = 0.0;
        for (double rho : {0.0, 0.4, 0.7, 1.0}) {
            std::vector<double> prod(1'000'000);
            for (auto& x : prod) {
                const auto f = sample_gg_correlated(p, rho, rng);
                x = f.up * f.down;
            }
            const double v = moments(prod).var;
            CHECK(v > prev);
            prev = v;
        }
    }

    SUBCASE("always four normals") {
        Rng a = make_stream(9, StreamId::CcrFade);
        Rng b = make_stream(9, StreamId::CcrFade);
        (void)sample_gg_correlated(p, 0.3, a);
        for (int i = 0; i < 4; ++i) {
            (void)draw_normal(b);
        }
        CHECK(a() == b());
    }

    SUBCASE("domain") {
        CHECK_THROWS_AS(sample_gg_correlated(p, -0.1, rng), std::domain_error);
        CHECK_THROWS_AS(sample_gg_correlated(p, 1.1, rng), std::domain_error);
        CHECK_THROWS_AS(sample_gg_correlated(p, std::nan(""), rng), std::domain_error);
    }
}

TEST_CASE("beam wander") {
    Rng rng = make_stream(3, StreamId::BeamWander);
    CHECK(sample_beam_wander({3.0, 0.0}, rng) == Angle2{});
    std::vector<double> az;
    for (int i = 0; i < 100'000; ++i) {
        az.push_back(sample_beam_wander({3.0, 50e-6}, rng).az);
    }
    CHECK(std::sqrt(moments(az).var) == doctest::Approx(50e-6).epsilon(0.02));
}
