#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

#include "ridges/direction_field.hpp"
#include "ridges/simulator.hpp"

using namespace ridges;
using Catch::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

/// Distance between orientations, respecting the mod-pi identification.
double orientation_distance(double a, double b) {
    double d = std::abs(detail::mod_pi(a) - detail::mod_pi(b));
    return std::min(d, kPi - d);
}

} // namespace

TEST_CASE("homogeneous field returns the constant frame") {
    DirectionField f = DirectionField::homogeneous(kPi / 2);
    for (TorusPoint x : {TorusPoint{0.1, 0.9}, TorusPoint{0.5, 0.5}, TorusPoint{0.0, 0.0}}) {
        Frame fr = f.frame_at(x);
        CHECK(fr.s.x == Approx(0.0).margin(1e-12));
        CHECK(fr.s.y == Approx(1.0).margin(1e-12));
        CHECK(fr.l.x == Approx(-1.0).margin(1e-12));
        CHECK(fr.l.y == Approx(0.0).margin(1e-12));
    }
}

TEST_CASE("delta singularity bends the orientation by -arg/2") {
    // at arg(w) = pi/2 the delta rule gives theta = -pi/4 = 3pi/4 mod pi
    DirectionField f = DirectionField::singular({{{0.0, 0.0}, SingularityKind::delta}}, 0.0);
    Frame fr = f.frame_at({0.0, 0.3});
    CHECK(f.theta_at({0.0, 0.3}) == Approx(3 * kPi / 4).margin(1e-12));
    CHECK(fr.s.x == Approx(-std::sqrt(0.5)).margin(1e-12));
    CHECK(fr.s.y == Approx(std::sqrt(0.5)).margin(1e-12));
}

TEST_CASE("core singularity bends the orientation by +arg/2") {
    // singular point at the domain center so arg(w) = pi is reachable
    DirectionField f = DirectionField::singular({{{0.5, 0.5}, SingularityKind::core}}, 0.0);
    TorusPoint x{0.2, 0.5};
    CHECK(f.theta_at(x) == Approx(kPi / 2).margin(1e-12));
    Frame fr = f.frame_at(x);
    CHECK(fr.s.x == Approx(0.0).margin(1e-12));
    CHECK(fr.s.y == Approx(1.0).margin(1e-12));
}

TEST_CASE("singularity_orientation hand values") {
    std::vector<Singularity> delta = {{{0.0, 0.0}, SingularityKind::delta}};
    CHECK(singularity_orientation(delta, 0.0, {0.3, 0.0}) == 0.0);  // arg = 0

    std::vector<Singularity> core = {{{0.0, 0.0}, SingularityKind::core}};
    CHECK(singularity_orientation(core, 0.0, {0.0, 0.3}) == Approx(kPi / 4).margin(1e-12));
}

TEST_CASE("single-element composition matches the pure formula everywhere") {
    detail::SplitMix64 rng(11);
    for (int i = 0; i < 500; ++i) {
        TorusPoint pos{rng.next_double(), rng.next_double()};
        TorusPoint x{rng.next_double(), rng.next_double()};
        if (x.x == pos.x && x.y == pos.y) continue;
        double theta0 = rng.next_double() * kPi;
        double a = std::atan2(x.y - pos.y, x.x - pos.x);
        CHECK(orientation_distance(
                  singularity_orientation({{pos, SingularityKind::core}}, theta0, x),
                  theta0 + 0.5 * a) < 1e-12);
        CHECK(orientation_distance(
                  singularity_orientation({{pos, SingularityKind::delta}}, theta0, x),
                  theta0 - 0.5 * a) < 1e-12);
    }
}

TEST_CASE("empty singularity list reduces to the homogeneous field") {
    detail::SplitMix64 rng(12);
    DirectionField empty = DirectionField::singular({}, 0.7);
    DirectionField hom = DirectionField::homogeneous(0.7);
    for (int i = 0; i < 200; ++i) {
        TorusPoint x{rng.next_double(), rng.next_double()};
        CHECK(empty.theta_at(x) == hom.theta_at(x));
    }
}

TEST_CASE("evaluation exactly at a singular point fails") {
    DirectionField f = DirectionField::singular({{{0.25, 0.75}, SingularityKind::core}}, 0.0);
    CHECK_THROWS_AS(f.theta_at({0.25, 0.75}), SingularityError);
}

TEST_CASE("frames are orthonormal for all variants") {
    detail::SplitMix64 rng(13);
    std::vector<DirectionField> fields;
    fields.push_back(DirectionField::homogeneous(1.1));
    fields.push_back(DirectionField::singular({{{0.5, 0.5}, SingularityKind::delta},
                                               {{0.25, 0.25}, SingularityKind::core}},
                                              0.3));
    fields.push_back(DirectionField::piecewise({{0.0, 0.0, 1.0, 0.5, 0.0},
                                                {0.0, 0.5, 1.0, 1.0, kPi / 2}}));
    AngleGrid grid;
    grid.width = 4;
    grid.height = 4;
    for (int i = 0; i < 16; ++i) grid.theta.push_back(rng.next_double() * 3.14);
    fields.push_back(DirectionField::angle_map(grid));
    for (const DirectionField& f : fields) {
        for (int i = 0; i < 300; ++i) {
            TorusPoint x{rng.next_double(), rng.next_double()};
            Frame fr = f.frame_at(x);
            REQUIRE(std::abs(norm(fr.s) - 1.0) < 1e-12);
            REQUIRE(std::abs(norm(fr.l) - 1.0) < 1e-12);
            REQUIRE(std::abs(dot(fr.s, fr.l)) < 1e-12);
            double t = f.theta_at(x);
            REQUIRE(t >= 0.0);
            REQUIRE(t < kPi);
        }
    }
}

TEST_CASE("theta and theta+pi give the same line directions") {
    detail::SplitMix64 rng(14);
    for (int i = 0; i < 200; ++i) {
        double t = rng.next_double() * kPi;
        Frame a = DirectionField::homogeneous(t).frame_at({0.5, 0.5});
        Frame b = DirectionField::homogeneous(t + kPi).frame_at({0.5, 0.5});
        double same = std::abs(a.s.x - b.s.x) + std::abs(a.s.y - b.s.y);
        double flip = std::abs(a.s.x + b.s.x) + std::abs(a.s.y + b.s.y);
        REQUIRE(std::min(same, flip) < 1e-12);
    }
}

TEST_CASE("piecewise rectangles must tile without overlap") {
    CHECK_THROWS_AS(DirectionField::piecewise({{0.0, 0.0, 0.6, 1.0, 0.0},
                                               {0.5, 0.0, 1.0, 1.0, 1.0}}),
                    ConfigError);
    CHECK_THROWS_AS(DirectionField::piecewise({{0.0, 0.0, 0.5, 1.0, 0.0}}), ConfigError);
    DirectionField ok = DirectionField::piecewise({{0.0, 0.0, 0.5, 1.0, 0.2},
                                                   {0.5, 0.0, 1.0, 1.0, 1.4}});
    CHECK(ok.theta_at({0.25, 0.5}) == Approx(0.2));
    CHECK(ok.theta_at({0.75, 0.5}) == Approx(1.4));
}

TEST_CASE("angle map parses and validates") {
    std::istringstream good("2 2\n1.5707963 1.5707963\n1.5707963 1.5707963\n");
    AngleGrid g = load_angle_map(good);
    REQUIRE(g.width == 2);
    REQUIRE(g.height == 2);
    for (int j = 0; j < 2; ++j)
        for (int i = 0; i < 2; ++i) CHECK(g.at(i, j) == Approx(kPi / 2).margin(1e-6));

    std::istringstream out_of_range("2 1\n1.0 3.2\n");
    CHECK_THROWS_AS(load_angle_map(out_of_range), ParseError);

    std::istringstream pi_folds("1 1\n3.141592653589793\n");
    CHECK(load_angle_map(pi_folds).at(0, 0) == 0.0);

    std::istringstream bad_header("two 2\n");
    CHECK_THROWS_AS(load_angle_map(bad_header), ParseError);

    std::istringstream short_row("3 1\n0.1 0.2\n");
    CHECK_THROWS_AS(load_angle_map(short_row), ParseError);

    std::istringstream missing_row("2 3\n0.1 0.2\n0.1 0.2\n");
    CHECK_THROWS_AS(load_angle_map(missing_row), ParseError);

    std::istringstream trailing("2 1\n0.1 0.2 0.3\n");
    CHECK_THROWS_AS(load_angle_map(trailing), ParseError);

    try {
        std::istringstream bad("2 2\n0.5 0.5\n0.5 9.9\n");
        load_angle_map(bad);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 3);  // errors carry the offending line
    }
}

TEST_CASE("angle interpolation works in doubled-angle space") {
    // constant grid: interpolation is exact everywhere
    AngleGrid constant;
    constant.width = 3;
    constant.height = 2;
    constant.theta.assign(6, kPi / 2);
    DirectionField f = DirectionField::angle_map(constant);
    detail::SplitMix64 rng(15);
    for (int i = 0; i < 300; ++i) {
        TorusPoint x{rng.next_double(), rng.next_double()};
        REQUIRE(orientation_distance(f.theta_at(x), kPi / 2) < 1e-15);
    }

    // adjacent cells 0.1 and pi-0.1: the midpoint orientation is 0, not pi/2
    AngleGrid two;
    two.width = 2;
    two.height = 1;
    two.theta = {0.1, kPi - 0.1};
    double mid = angle_map_theta(two, {0.5, 0.5});
    CHECK(orientation_distance(mid, 0.0) < 1e-12);
    CHECK(orientation_distance(mid, kPi / 2) > 1.0);

    // at a cell center the interpolation collapses to that cell's value
    AngleGrid four;
    four.width = 2;
    four.height = 2;
    four.theta = {0.3, 0.9, 1.5, 2.1};
    CHECK(orientation_distance(angle_map_theta(four, {0.25, 0.25}), 0.3) < 1e-12);
    CHECK(orientation_distance(angle_map_theta(four, {0.75, 0.75}), 2.1) < 1e-12);
}

TEST_CASE("streamlines follow the ridge direction") {
    DirectionField vertical = DirectionField::homogeneous(kPi / 2);
    auto line = trace_streamline(vertical, {0.5, 0.5}, 0.01, 10);
    REQUIRE(line.size() == 11);
    for (std::size_t i = 0; i < line.size(); ++i) {
        CHECK(line[i].x == Approx(0.5).margin(1e-12));
        CHECK(line[i].y == Approx(0.5 + 0.01 * i).margin(1e-12));
    }

    // traces truncate at the domain boundary instead of wrapping
    auto clipped = trace_streamline(vertical, {0.5, 0.97}, 0.01, 10);
    CHECK(clipped.size() <= 4);

    // seeding exactly on a singular point truncates immediately, no crash
    DirectionField sing = DirectionField::singular({{{0.5, 0.5}, SingularityKind::delta}}, 0.0);
    auto truncated = trace_streamline(sing, {0.5, 0.5}, 0.01, 10);
    CHECK(truncated.size() == 1);
}

TEST_CASE("core streamlines mirror across the axis through the core") {
    // reflecting across y = 0.5 negates arg, so theta maps to -theta; the
    // mod-pi representative lands on the opposite sign branch of s, hence
    // the mirrored seed is traced with initial_sign = -1
    DirectionField f = DirectionField::singular({{{0.5, 0.5}, SingularityKind::core}}, 0.0);
    auto up = trace_streamline(f, {0.8, 0.65}, 0.005, 40, +1);
    auto down = trace_streamline(f, {0.8, 0.35}, 0.005, 40, -1);
    REQUIRE(up.size() == down.size());
    for (std::size_t i = 0; i < up.size(); ++i) {
        CHECK(up[i].x == Approx(down[i].x).margin(1e-12));
        CHECK(up[i].y - 0.5 == Approx(0.5 - down[i].y).margin(1e-12));
    }
}
