#pragma once

#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ridges/errors.hpp"
#include "ridges/geometry.hpp"

namespace ridges {

/// Orthonormal orientation frame: s is the ridge direction (smallest
/// stress), l the direction across the ridges (largest stress).
struct Frame {
    Vec2 s;
    Vec2 l;
};

enum class SingularityKind { core, delta };

struct Singularity {
    TorusPoint position;
    SingularityKind kind = SingularityKind::core;
};

/// Regular grid of orientation angles in [0, pi). Row 0 sits nearest y=0;
/// cell (i, j) is centered at ((i+0.5)/width, (j+0.5)/height).
struct AngleGrid {
    int width = 0;
    int height = 0;
    std::vector<double> theta;  // row-major, bottom row first

    double at(int i, int j) const { return theta[static_cast<std::size_t>(j) * width + i]; }
};

namespace detail {

inline constexpr double kPi = std::numbers::pi;

/// Reduce an angle modulo pi into [0, pi).
inline double mod_pi(double t) {
    double r = std::fmod(t, kPi);
    if (r < 0.0) r += kPi;
    if (r >= kPi) r = 0.0;  // r + pi can round up to pi exactly
    return r;
}

} // namespace detail

/// Orientation angle of a composed singularity field at x:
/// theta0 plus index * arg(x - position) summed over singularities, with
/// index +1/2 for a core and -1/2 for a delta, reduced mod pi. The argument
/// uses the plane displacement of the wrapped coordinates, not the
/// minimum image: these fields are global models and need not be periodic.
inline double singularity_orientation(const std::vector<Singularity>& sings,
                                      double theta0, TorusPoint x) {
    double t = theta0;
    for (const Singularity& s : sings) {
        double wx = x.x - s.position.x;
        double wy = x.y - s.position.y;
        if (wx == 0.0 && wy == 0.0)
            throw SingularityError("orientation undefined exactly at a singular point");
        double a = std::atan2(wy, wx);
        t += (s.kind == SingularityKind::core) ? 0.5 * a : -0.5 * a;
    }
    return detail::mod_pi(t);
}

/// Parse an angle map: first line "width height", then height rows of width
/// angles in radians, bottom row first. Values must lie in [0, pi]; pi folds
/// to 0 since orientations are mod pi.
inline AngleGrid load_angle_map(std::istream& in) {
    std::string line;
    int lineno = 0;
    if (!std::getline(in, line)) throw ParseError("empty angle map", 1);
    ++lineno;
    AngleGrid grid;
    {
        std::istringstream hs(line);
        std::string extra;
        if (!(hs >> grid.width >> grid.height) || grid.width <= 0 || grid.height <= 0)
            throw ParseError("expected 'width height' with positive integers", lineno);
        if (hs >> extra) throw ParseError("trailing tokens after header", lineno);
    }
    grid.theta.reserve(static_cast<std::size_t>(grid.width) * grid.height);
    for (int j = 0; j < grid.height; ++j) {
        if (!std::getline(in, line))
            throw ParseError("expected " + std::to_string(grid.height) + " data rows, got " +
                                 std::to_string(j), lineno + 1);
        ++lineno;
        std::istringstream ls(line);
        for (int i = 0; i < grid.width; ++i) {
            double v;
            if (!(ls >> v))
                throw ParseError("expected " + std::to_string(grid.width) + " values in row", lineno);
            if (!(v >= 0.0) || v > detail::kPi)
                throw ParseError("angle " + std::to_string(v) + " outside [0, pi]", lineno);
            if (v >= detail::kPi) v = 0.0;
            grid.theta.push_back(v);
        }
        std::string extra;
        if (ls >> extra) throw ParseError("trailing tokens after row values", lineno);
    }
    return grid;
}

/// Interpolated orientation at x. Angles are pi-periodic, so interpolation
/// happens on the doubled-angle vectors (cos 2t, sin 2t) over the four
/// surrounding cell centers with periodic wrap; plain averaging of angles
/// across the pi wrap would be meaningless.
inline double angle_map_theta(const AngleGrid& grid, TorusPoint x) {
    auto wrap_index = [](long long i, int n) {
        long long r = i % n;
        if (r < 0) r += n;
        return static_cast<int>(r);
    };
    double u = x.x * grid.width - 0.5;
    double v = x.y * grid.height - 0.5;
    double fu = u - std::floor(u);
    double fv = v - std::floor(v);
    auto iu = static_cast<long long>(std::floor(u));
    auto iv = static_cast<long long>(std::floor(v));
    int i0 = wrap_index(iu, grid.width), i1 = wrap_index(iu + 1, grid.width);
    int j0 = wrap_index(iv, grid.height), j1 = wrap_index(iv + 1, grid.height);

    double cx = 0.0, cy = 0.0;
    const double w[4] = {(1 - fu) * (1 - fv), fu * (1 - fv), (1 - fu) * fv, fu * fv};
    const int ii[4] = {i0, i1, i0, i1};
    const int jj[4] = {j0, j0, j1, j1};
    for (int c = 0; c < 4; ++c) {
        double t2 = 2.0 * grid.at(ii[c], jj[c]);
        cx += w[c] * std::cos(t2);
        cy += w[c] * std::sin(t2);
    }
    if (cx == 0.0 && cy == 0.0)
        throw SingularityError("degenerate orientation: opposing angles cancel at query point");
    return detail::mod_pi(0.5 * std::atan2(cy, cx));
}

/// Axis-aligned rectangle [x0,x1) x [y0,y1) carrying a constant orientation.
struct PiecewiseRect {
    double x0, y0, x1, y1;
    double theta;
};

/// Orientation field over the unit square, one of: constant angle, a
/// composition of core/delta singularities, piecewise-constant rectangles,
/// or an interpolated angle grid.
class DirectionField {
  public:
    static DirectionField homogeneous(double theta0) {
        return DirectionField(Homogeneous{detail::mod_pi(theta0)});
    }
    static DirectionField singular(std::vector<Singularity> sings, double theta0) {
        return DirectionField(Singular{std::move(sings), theta0});
    }
    static DirectionField piecewise(std::vector<PiecewiseRect> rects) {
        double area = 0.0;
        for (std::size_t a = 0; a < rects.size(); ++a) {
            const auto& r = rects[a];
            if (!(r.x0 < r.x1 && r.y0 < r.y1) || r.x0 < 0 || r.y0 < 0 || r.x1 > 1 || r.y1 > 1)
                throw ConfigError("piecewise rectangle outside [0,1)^2 or empty");
            area += (r.x1 - r.x0) * (r.y1 - r.y0);
            for (std::size_t b = a + 1; b < rects.size(); ++b) {
                const auto& q = rects[b];
                if (r.x0 < q.x1 && q.x0 < r.x1 && r.y0 < q.y1 && q.y0 < r.y1)
                    throw ConfigError("piecewise rectangles overlap");
            }
        }
        if (std::abs(area - 1.0) > 1e-9)
            throw ConfigError("piecewise rectangles do not tile the unit square");
        return DirectionField(Piecewise{std::move(rects)});
    }
    static DirectionField angle_map(AngleGrid grid) {
        return DirectionField(AngleMap{std::move(grid)});
    }

    /// Orientation angle in [0, pi) at x.
    double theta_at(TorusPoint x) const {
        if (const auto* h = std::get_if<Homogeneous>(&field_)) return h->theta0;
        if (const auto* s = std::get_if<Singular>(&field_))
            return singularity_orientation(s->sings, s->theta0, x);
        if (const auto* p = std::get_if<Piecewise>(&field_)) {
            for (const auto& r : p->rects)
                if (x.x >= r.x0 && x.x < r.x1 && x.y >= r.y0 && x.y < r.y1)
                    return detail::mod_pi(r.theta);
            for (const auto& r : p->rects)  // boundary slivers from rounding
                if (x.x >= r.x0 && x.x <= r.x1 && x.y >= r.y0 && x.y <= r.y1)
                    return detail::mod_pi(r.theta);
            throw ConfigError("piecewise field: point not covered by any rectangle");
        }
        return angle_map_theta(std::get<AngleMap>(field_).grid, x);
    }

    /// Orthonormal frame s = (cos t, sin t), l = (-sin t, cos t) at x.
    Frame frame_at(TorusPoint x) const {
        double t = theta_at(x);
        double c = std::cos(t), s = std::sin(t);
        return {{c, s}, {-s, c}};
    }

    bool is_homogeneous() const { return std::holds_alternative<Homogeneous>(field_); }

    /// Ridge angle of a homogeneous field (meaningless otherwise).
    double homogeneous_theta() const { return std::get<Homogeneous>(field_).theta0; }

    /// Emit the field as config entries via put(key, value). Angle-map
    /// fields are referenced by their source path.
    template <class Fn>
    void describe(Fn&& put, const std::string& angle_map_path) const {
        auto num = [](double v) {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            return std::string(buf);
        };
        if (const auto* h = std::get_if<Homogeneous>(&field_)) {
            put("field.type", "homogeneous");
            put("field.theta0", num(h->theta0));
        } else if (const auto* s = std::get_if<Singular>(&field_)) {
            put("field.type", "singularities");
            put("field.theta0", num(s->theta0));
            for (const Singularity& sg : s->sings)
                put("field.singularity",
                    std::string(sg.kind == SingularityKind::core ? "core" : "delta") + " " +
                        num(sg.position.x) + " " + num(sg.position.y));
        } else if (const auto* p = std::get_if<Piecewise>(&field_)) {
            put("field.type", "piecewise");
            for (const auto& r : p->rects)
                put("field.rect", num(r.x0) + " " + num(r.y0) + " " + num(r.x1) + " " +
                                      num(r.y1) + " " + num(r.theta));
        } else {
            if (angle_map_path.empty())
                throw IoError("cannot describe an angle-map field without its source path");
            put("field.type", "angle_map");
            put("field.angle_map", angle_map_path);
        }
    }

  private:
    struct Homogeneous {
        double theta0;
    };
    struct Singular {
        std::vector<Singularity> sings;
        double theta0;
    };
    struct Piecewise {
        std::vector<PiecewiseRect> rects;
    };
    struct AngleMap {
        AngleGrid grid;
    };
    using Variant = std::variant<Homogeneous, Singular, Piecewise, AngleMap>;

    explicit DirectionField(Variant f) : field_(std::move(f)) {}
    Variant field_;
};

/// Trace a field line of s by fixed-step integration, flipping the sign of
/// s at each step to stay aligned with the previous direction. The trace
/// truncates when it leaves the unit square or hits a singular point.
/// initial_sign = -1 follows the opposite branch from the seed.
inline std::vector<Vec2> trace_streamline(const DirectionField& field, TorusPoint seed,
                                          double step, int n_steps, int initial_sign = 1) {
    if (!(step > 0.0)) throw InputError("trace_streamline: step must be positive");
    std::vector<Vec2> line;
    line.push_back({seed.x, seed.y});
    Vec2 p{seed.x, seed.y};
    Vec2 prev_dir{0.0, 0.0};
    try {
        prev_dir = field.frame_at(seed).s;
        if (initial_sign < 0) prev_dir = -prev_dir;
        for (int i = 0; i < n_steps; ++i) {
            Vec2 s = field.frame_at({p.x, p.y}).s;
            if (dot(s, prev_dir) < 0.0) s = -s;
            p = p + step * s;
            if (p.x < 0.0 || p.x >= 1.0 || p.y < 0.0 || p.y >= 1.0) break;
            line.push_back(p);
            prev_dir = s;
        }
    } catch (const SingularityError&) {
        // truncated trace
    }
    return line;
}

} // namespace ridges
