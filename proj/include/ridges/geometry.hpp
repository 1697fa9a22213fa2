#pragma once

#include <cmath>

#include "ridges/errors.hpp"

namespace ridges {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator*(double c, Vec2 v) { return {c * v.x, c * v.y}; }
    friend constexpr Vec2 operator-(Vec2 v) { return {-v.x, -v.y}; }
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

/// A point on the unit torus; both coordinates stay in [0,1).
struct TorusPoint {
    double x = 0.0;
    double y = 0.0;
};

/// Minimum-image displacement between two torus points; |dx|,|dy| <= 0.5.
struct TorusVector {
    double dx = 0.0;
    double dy = 0.0;
};

namespace detail {

inline double wrap_unit(double v) {
    double r = v - std::floor(v);
    // x - floor(x) can round up to 1.0 when x is just below an integer.
    if (r >= 1.0) r -= 1.0;
    return r;
}

/// Reduce a coordinate difference to the representative in (-0.5, 0.5].
inline double min_image(double d) {
    double r = d - std::nearbyint(d);
    if (r == -0.5) r = 0.5;
    return r;
}

} // namespace detail

/// Reduce raw plane coordinates modulo 1 into [0,1)^2.
inline TorusPoint wrap(Vec2 p) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
        throw InputError("wrap: non-finite coordinate");
    return {detail::wrap_unit(p.x), detail::wrap_unit(p.y)};
}

/// a - b on the torus, each component shifted into (-0.5, 0.5].
/// The half-period tie always resolves to +0.5; forces vanish at that
/// separation anyway, so dynamics never see the choice.
inline TorusVector displacement(TorusPoint a, TorusPoint b) {
    return {detail::min_image(a.x - b.x), detail::min_image(a.y - b.y)};
}

/// Euclidean length of the minimum-image displacement; at most sqrt(2)/2.
inline double distance(TorusPoint a, TorusPoint b) {
    TorusVector d = displacement(a, b);
    return std::sqrt(d.dx * d.dx + d.dy * d.dy);
}

} // namespace ridges
