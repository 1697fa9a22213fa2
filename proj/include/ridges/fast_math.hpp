#pragma once

#include <bit>
#include <cmath>
#include <cstdint>

// Branch-free elementwise exp/sin/cos used inside the pair-force kernels.
// Plain libm calls block auto-vectorization of those loops, which makes the
// long production runs several times slower. These versions are pure
// arithmetic plus integer bit manipulation, so the compiler can vectorize
// the surrounding loop, and they evaluate identically for identical inputs
// no matter which code path calls them (a requirement for the bit-exact
// direct vs cell-list contract).
//
// Accuracy: a few ulp over the ranges the force laws use (tested against
// libm in test_fast_math.cpp). Argument reduction in fast_sincos is exact
// for |x| up to ~2^20; force-law arguments stay below ~10^3.

namespace ridges::detail {

inline constexpr double kLog2E = 1.4426950408889634074;  // 1/ln 2
inline constexpr double kLn2Hi = 6.93147180369123816490e-01;
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;

/// exp(x); clamps to 0 / inf outside the finite double range.
inline double fast_exp(double x) {
    if (!(x == x)) return x;  // NaN: avoid UB in the int conversion below
    if (x < -708.396418532264106224) return 0.0;
    if (x > 709.782712893383973096) return HUGE_VAL;
    double kd = std::nearbyint(x * kLog2E);
    auto k = static_cast<std::int64_t>(kd);
    double r = (x - kd * kLn2Hi) - kd * kLn2Lo;
    // degree-13 minimax fit of e^r on [-ln2/2, ln2/2]
    double p = 1.6091222422211312e-10;
    p = p * r + 2.0925030906575985e-09;
    p = p * r + 2.505205522439939e-08;
    p = p * r + 2.755723946918975e-07;
    p = p * r + 2.755731926752872e-06;
    p = p * r + 2.4801587366913654e-05;
    p = p * r + 1.9841269841251534e-04;
    p = p * r + 1.3888888888861424e-03;
    p = p * r + 8.333333333333337e-03;
    p = p * r + 4.166666666666672e-02;
    p = p * r + 1.6666666666666666e-01;
    p = p * r + 0.5;
    p = p * r + 1.0;
    p = p * r + 1.0;
    // scale by 2^k through the exponent field, split so subnormals round
    std::int64_t k1 = k / 2;
    std::int64_t k2 = k - k1;
    double s1 = std::bit_cast<double>((k1 + 1023) << 52);
    double s2 = std::bit_cast<double>((k2 + 1023) << 52);
    return p * s1 * s2;
}

inline constexpr double kTwoOverPi = 0.63661977236758134308;
inline constexpr double kPio2Hi = 1.57079632673412561417e+00;
inline constexpr double kPio2Mid = 6.07710050650619224932e-11;
inline constexpr double kPio2Lo = 2.02226624879595063154e-21;

struct SinCos {
    double sin;
    double cos;
};

/// Simultaneous sin(x), cos(x) via quadrant reduction.
inline SinCos fast_sincos(double x) {
    double kd = std::nearbyint(x * kTwoOverPi);
    auto k = static_cast<std::int64_t>(kd);
    double r = ((x - kd * kPio2Hi) - kd * kPio2Mid) - kd * kPio2Lo;
    double u = r * r;
    // minimax kernels on |r| <= pi/4: sin(r) = r + r*u*S(u), cos(r) = C(u)
    double sp = 1.5894736651849094e-10;
    sp = sp * u + -2.5050716974102745e-08;
    sp = sp * u + 2.755731337640013e-06;
    sp = sp * u + -1.98412698286503e-04;
    sp = sp * u + 8.333333333320363e-03;
    sp = sp * u + -1.6666666666666616e-01;
    double s = r + r * u * sp;
    double cp = -1.1353379638297575e-11;
    cp = cp * u + 2.0875582380663952e-09;
    cp = cp * u + -2.7557313097790086e-07;
    cp = cp * u + 2.4801587283881152e-05;
    cp = cp * u + -1.3888888888861095e-03;
    cp = cp * u + 4.166666666666645e-02;
    double c = 1.0 + u * (-0.5 + u * cp);
    // rotate by k quadrants (k & 3 is a true mod for two's complement)
    std::int64_t q = k & 3;
    double sk = (q & 1) ? c : s;                     // kernel feeding sin(x)
    double ck = (q & 1) ? s : c;                     // kernel feeding cos(x)
    double sin_sign = (q >= 2) ? -1.0 : 1.0;         // sin flips in q = 2,3
    double cos_sign = (q == 1 || q == 2) ? -1.0 : 1.0;  // cos flips in q = 1,2
    return {sin_sign * sk, cos_sign * ck};
}

} // namespace ridges::detail
