#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "ridges/fast_math.hpp"
#include "ridges/simulator.hpp"

using namespace ridges::detail;

TEST_CASE("fast_exp tracks libm over the force-law range") {
    double worst = 0.0;
    for (int i = 0; i <= 200000; ++i) {
        double x = -120.0 * i / 200000.0;
        double ref = std::exp(x);
        double got = fast_exp(x);
        double rel = std::abs(got - ref) / ref;
        worst = std::max(worst, rel);
    }
    CHECK(worst < 4e-16);
    CHECK(fast_exp(0.0) == 1.0);
}

TEST_CASE("fast_exp handles the wide range and special values") {
    SplitMix64 rng(7);
    double worst = 0.0;
    for (int i = 0; i < 20000; ++i) {
        double x = (rng.next_double() - 0.5) * 1400.0;
        double ref = std::exp(x);
        double got = fast_exp(x);
        if (ref == 0.0 || std::isinf(ref)) {
            CHECK(got == ref);
        } else if (ref >= std::numeric_limits<double>::min()) {
            worst = std::max(worst, std::abs(got - ref) / ref);
        }
    }
    CHECK(worst < 1e-15);
    CHECK(fast_exp(-1e6) == 0.0);
    CHECK(std::isinf(fast_exp(1e6)));
    CHECK(std::isnan(fast_exp(std::nan(""))));
}

TEST_CASE("fast_sincos tracks libm up to large force-law arguments") {
    double worst = 0.0;
    for (int i = 0; i <= 300000; ++i) {
        double x = 150.0 * (i - 150000) / 150000.0;
        SinCos sc = fast_sincos(x);
        worst = std::max(worst, std::abs(sc.sin - std::sin(x)));
        worst = std::max(worst, std::abs(sc.cos - std::cos(x)));
    }
    CHECK(worst < 5e-16);
}

TEST_CASE("fast_sincos is exact at quadrant anchors") {
    CHECK(fast_sincos(0.0).sin == 0.0);
    CHECK(fast_sincos(0.0).cos == 1.0);
    // near-multiples of pi/2 stay accurate
    for (int k = -8; k <= 8; ++k) {
        double x = k * 1.5707963267948966;
        SinCos sc = fast_sincos(x);
        CHECK(std::abs(sc.sin - std::sin(x)) < 5e-16);
        CHECK(std::abs(sc.cos - std::cos(x)) < 5e-16);
    }
}
