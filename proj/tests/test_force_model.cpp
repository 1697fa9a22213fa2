#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "ridges/force_model.hpp"
#include "ridges/simulator.hpp"

using namespace ridges;
using Catch::Approx;

namespace {

ForceModel kc_stationary() { return preset("kc_stationary"); }

Frame frame_for(double theta) {
    return DirectionField::homogeneous(theta).frame_at({0.5, 0.5});
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

} // namespace

// Frozen expected values below were computed independently from the closed
// forms f_R(r) = (270 r^2 + 0.1) e^{-100 r}, f_A(r) = -gamma r e^{-95 r} and
// the harmonic ansatz, with 40-digit arithmetic rounded to double.

TEST_CASE("kc coefficients match the closed forms") {
    ForceModel m = kc_stationary();  // gamma = 10.5, chi = 0.2, scale_l = 1
    ChannelCoeffs c = coefficients(m, 0.01);
    CHECK(rel_diff(c.f_l, 0.006112881566050548) < 1e-14);
    CHECK(rel_diff(c.f_s, 0.03859912753622865) < 1e-14);

    c = coefficients(m, 0.03);  // attractive across ridges at mid range
    CHECK(rel_diff(c.f_l, -0.0011439966253967834) < 1e-14);
    CHECK(rel_diff(c.f_s, 0.013432772235062508) < 1e-14);
}

TEST_CASE("harmonic coefficients match the closed forms") {
    ForceModel m = preset("bio_harmonic");
    ChannelCoeffs c = coefficients(m, 0.0);
    CHECK(c.f_s == 0.1);
    CHECK(c.f_l == 0.1);

    c = coefficients(m, 0.022);  // cos(pi) = -1 kills the second term
    CHECK(rel_diff(c.f_l, -0.1 * std::exp(-3.52)) < 1e-14);
    CHECK(rel_diff(c.f_l, -0.0029599435167892) < 1e-14);
    CHECK(rel_diff(c.f_s, 0.01981375253519942) < 1e-13);
}

TEST_CASE("piecewise coefficients splice the kc channels") {
    ForceModel m = preset("kc_piecewise");
    // beyond c2 the coefficient is the negated full sum
    ChannelCoeffs c = coefficients(m, 0.07);
    CHECK(rel_diff(c.f_l, -0.000346501789466678) < 1e-13);
    c = coefficients(m, 0.2);
    double direct = -((270 * 0.2 * 0.2 + 0.1) * std::exp(-100 * 0.2) -
                      10.5 * 0.2 * std::exp(-95 * 0.2));
    CHECK(rel_diff(c.f_l, direct) < 1e-13);
    // below c1 it is the plain sum; the s channel is untouched everywhere
    c = coefficients(m, 0.03);
    CHECK(rel_diff(c.f_l, -0.0011439966253967834) < 1e-13);
    CHECK(rel_diff(c.f_s, 0.013432772235062508) < 1e-13);
}

TEST_CASE("piecewise law is continuous at both thresholds") {
    ForceModel m = preset("kc_piecewise");
    for (double c0 : {0.06, 0.07}) {
        double lo = coefficients(m, c0 - 1e-9).f_l;
        double at = coefficients(m, c0).f_l;
        double hi = coefficients(m, c0 + 1e-9).f_l;
        CHECK(std::abs(lo - at) < 1e-8);
        CHECK(std::abs(hi - at) < 1e-8);
    }
}

TEST_CASE("presets carry the published parameters") {
    CHECK(std::get<KCLaw>(preset("kc_original").law).params.gamma == 35.0);
    CHECK(std::get<KCLaw>(preset("kc_original").law).params.chi == 0.2);
    CHECK(std::get<KCLaw>(preset("kc_stationary").law).params.gamma == 10.5);
    CHECK(std::get<HarmonicLaw>(preset("bio_harmonic").law).params.a_l == 0.022);
    CHECK(std::get<PiecewiseLaw>(preset("kc_piecewise").law).c1 == 0.06);
    CHECK(std::get<PiecewiseLaw>(preset("kc_piecewise").law).c2 == 0.07);
    for (const char* name : kPresetNames) {
        ForceModel m = preset(name);
        CHECK(m.eta == 1.0);
        CHECK(m.cutoff == 0.1);
    }
    CHECK_THROWS_AS(preset("no_such_model"), ConfigError);
    try {
        preset("no_such_model");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("kc_stationary") != std::string::npos);
    }
}

TEST_CASE("pair force vanishes at and beyond the cutoff") {
    detail::SplitMix64 rng(21);
    for (const char* name : kPresetNames) {
        ForceModel m = preset(name);
        m.cutoff = 0.5;
        Frame fr = frame_for(0.7);
        Vec2 f = pair_force(m, {0.5, 0.0}, fr);
        CHECK(f.x == 0.0);
        CHECK(f.y == 0.0);
        f = pair_force(m, {0.0, 0.0}, fr);
        CHECK(f.x == 0.0);
        CHECK(f.y == 0.0);
        for (int i = 0; i < 200; ++i) {
            double ang = rng.next_double() * 6.28;
            double r = 0.5 + 0.2 * rng.next_double();
            double scale = std::min(r, 0.70);
            TorusVector d{scale * std::cos(ang) * 0.999, scale * std::sin(ang) * 0.999};
            if (std::hypot(d.dx, d.dy) < m.cutoff) continue;
            Vec2 g = pair_force(m, d, fr);
            REQUIRE(g.x == 0.0);
            REQUIRE(g.y == 0.0);
        }
    }
}

TEST_CASE("pair force is antisymmetric in d, bit for bit") {
    detail::SplitMix64 rng(22);
    for (const char* name : kPresetNames) {
        ForceModel m = preset(name);
        m.cutoff = 0.5;
        for (int i = 0; i < 500; ++i) {
            Frame fr = frame_for(rng.next_double() * 3.14);
            TorusVector d{(rng.next_double() - 0.5) * 0.9, (rng.next_double() - 0.5) * 0.9};
            Vec2 f = pair_force(m, d, fr);
            Vec2 g = pair_force(m, {-d.dx, -d.dy}, fr);
            REQUIRE(f.x == -g.x);
            REQUIRE(f.y == -g.y);
        }
    }
}

TEST_CASE("pair force is invariant under frame sign flips, bit for bit") {
    detail::SplitMix64 rng(23);
    for (const char* name : kPresetNames) {
        ForceModel m = preset(name);
        m.cutoff = 0.5;
        for (int i = 0; i < 300; ++i) {
            Frame fr = frame_for(rng.next_double() * 3.14);
            TorusVector d{(rng.next_double() - 0.5) * 0.8, (rng.next_double() - 0.5) * 0.8};
            Vec2 f = pair_force(m, d, fr);
            Frame both{{-fr.s.x, -fr.s.y}, {-fr.l.x, -fr.l.y}};
            Frame lonly{fr.s, {-fr.l.x, -fr.l.y}};
            Vec2 g = pair_force(m, d, both);
            Vec2 h = pair_force(m, d, lonly);
            REQUIRE(f.x == g.x);
            REQUIRE(f.y == g.y);
            REQUIRE(f.x == h.x);
            REQUIRE(f.y == h.y);
        }
    }
}

TEST_CASE("chi = 1 with unit attraction scale gives a radial force") {
    ForceModel m = kc_stationary();
    std::get<KCLaw>(m.law).params.chi = 1.0;
    m.cutoff = 0.5;
    TorusVector d{0.01, 0.02};
    double r = std::hypot(d.dx, d.dy);
    double g = (270 * r * r + 0.1) * std::exp(-100 * r) - 10.5 * r * std::exp(-95 * r);
    // any orthonormal frame must give the same radial answer
    for (double theta : {0.0, 0.3, 1.2, 2.9}) {
        Vec2 f = pair_force(m, d, frame_for(theta));
        CHECK(f.x == Approx(g * d.dx).epsilon(1e-12));
        CHECK(f.y == Approx(g * d.dy).epsilon(1e-12));
    }
}

TEST_CASE("rescaling the argument equals evaluating at the rescaled separation") {
    // substitution identity: F_eta(d) = F_1(eta d); both separations kept
    // below the cutoff so the hard zero never interferes
    detail::SplitMix64 rng(24);
    for (const char* name : kPresetNames) {
        ForceModel m = preset(name);
        m.cutoff = 0.5;
        ForceModel unit = m;
        for (double eta : {0.6, 0.8, 1.2, 2.0}) {
            m.eta = eta;
            for (int i = 0; i < 200; ++i) {
                Frame fr = frame_for(rng.next_double() * 3.14);
                double ang = rng.next_double() * 6.28;
                double r = 0.01 + 0.2 * rng.next_double();
                TorusVector d{r * std::cos(ang), r * std::sin(ang)};
                Vec2 lhs = pair_force(m, d, fr);
                Vec2 rhs = pair_force(unit, {eta * d.dx, eta * d.dy}, fr);
                REQUIRE(lhs.x == Approx(rhs.x).margin(1e-18).epsilon(1e-12));
                REQUIRE(lhs.y == Approx(rhs.y).margin(1e-18).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("ridge-direction channel is purely repulsive for the stationary presets") {
    ForceModel stat = kc_stationary();
    ForceModel harm = preset("bio_harmonic");
    for (int i = 1; i <= 10000; ++i) {
        double r = 0.5 * i / 10000;
        REQUIRE(coefficients(stat, r).f_s > 0.0);
        REQUIRE(coefficients(harm, r).f_s > 0.0);
    }
}

TEST_CASE("cross-ridge channel signs: +,-,+ for kc_stationary") {
    ForceModel m = kc_stationary();
    CHECK(coefficients(m, 0.005).f_l > 0.0);
    CHECK(coefficients(m, 0.03).f_l < 0.0);
    CHECK(coefficients(m, 0.1).f_l > 0.0);
}

TEST_CASE("cross-ridge channel turns attractive within (0.011, 0.022) for bio_harmonic") {
    ForceModel m = preset("bio_harmonic");
    CHECK(coefficients(m, 0.011).f_l > 0.0);
    CHECK(coefficients(m, 0.022).f_l < 0.0);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(coefficients(kc_stationary(), -0.1), InputError);
    ForceModel m = kc_stationary();
    m.cutoff = 0.6;
    CHECK_THROWS_AS(validate(m), ConfigError);
    m.cutoff = 0.1;
    m.eta = 0.0;
    CHECK_THROWS_AS(validate(m), ConfigError);
    m.eta = 1.0;
    std::get<KCLaw>(m.law).params.chi = 1.5;
    CHECK_THROWS_AS(validate(m), ConfigError);
    ForceModel pw = preset("kc_piecewise");
    std::get<PiecewiseLaw>(pw.law).c2 = 0.05;
    CHECK_THROWS_AS(validate(pw), ConfigError);
}
