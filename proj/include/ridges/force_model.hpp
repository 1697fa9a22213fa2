#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <variant>

#include "ridges/errors.hpp"
#include "ridges/fast_math.hpp"
#include "ridges/geometry.hpp"
#include "ridges/direction_field.hpp"

namespace ridges {

/// Repulsion/attraction coefficient parameters:
///   f_R(r) = (alpha r^2 + beta) exp(-e_R r)
///   f_A(r) = -gamma r exp(-e_A r)
struct KCParams {
    double alpha = 270.0;
    double beta = 0.1;
    double gamma = 35.0;
    double e_A = 95.0;
    double e_R = 100.0;
    double chi = 0.2;
};

/// Damped-oscillator ansatz parameters:
///   f_s(r) = c exp(e_s1 r) + c_s sin(pi r / a_s) exp(e_s2 r)
///   f_l(r) = c cos(pi r / a_l) exp(e_l1 r) + c_l sin(pi r / a_l) exp(e_l2 r)
struct HarmonicParams {
    double c = 0.1;
    double c_s = -0.05;
    double c_l = 0.005;
    double e_s1 = -65.0;
    double e_s2 = -100.0;
    double e_l1 = -160.0;
    double e_l2 = -40.0;
    double a_s = 0.03;
    double a_l = 0.022;
};

/// Repulsion/attraction channels: f_s = chi f_A + f_R along the ridge
/// direction, f_l = attraction_scale_l * f_A + f_R across it. A scale of 1
/// is the plain sum of the two forces; 0.3 is the adapted attraction that
/// keeps patterns stationary.
struct KCLaw {
    KCParams params;
    double attraction_scale_l = 1.0;
};

/// Cross-ridge coefficient spliced at [c1, c2]: the plain f(r,1) below c1,
/// its negation (a weak attraction decaying to zero) above c2, and a linear
/// interpolation between.
struct PiecewiseLaw {
    KCParams params;
    double c1 = 0.06;
    double c2 = 0.07;
};

struct HarmonicLaw {
    HarmonicParams params;
};

/// A complete interaction force: law, argument rescaling eta (separations
/// are multiplied by eta before entering the coefficients, which scales
/// ridge spacing by 1/eta), and the hard interaction cutoff applied to the
/// geometric separation.
struct ForceModel {
    std::variant<KCLaw, PiecewiseLaw, HarmonicLaw> law = KCLaw{};
    double eta = 1.0;
    double cutoff = 0.1;
};

/// Scalar coefficients multiplying (l.d)l and (s.d)s; positive values repel.
struct ChannelCoeffs {
    double f_l;
    double f_s;
};

namespace detail {

struct KCEval {
    double alpha, beta, gamma, e_A, e_R, chi, scale_l;

    explicit KCEval(const KCLaw& law)
        : alpha(law.params.alpha), beta(law.params.beta), gamma(law.params.gamma),
          e_A(law.params.e_A), e_R(law.params.e_R), chi(law.params.chi),
          scale_l(law.attraction_scale_l) {}

    ChannelCoeffs operator()(double r) const {
        double fR = (alpha * r * r + beta) * fast_exp(-e_R * r);
        double fA = -gamma * r * fast_exp(-e_A * r);
        return {scale_l * fA + fR, chi * fA + fR};
    }
};

struct PiecewiseEval {
    double alpha, beta, gamma, e_A, e_R, chi;
    double c1, c2, inv_width, f_c1, f_c2;

    explicit PiecewiseEval(const PiecewiseLaw& law)
        : alpha(law.params.alpha), beta(law.params.beta), gamma(law.params.gamma),
          e_A(law.params.e_A), e_R(law.params.e_R), chi(law.params.chi),
          c1(law.c1), c2(law.c2), inv_width(1.0 / (law.c2 - law.c1)),
          f_c1(full_sum(c1)), f_c2(full_sum(c2)) {}

    double full_sum(double r) const {  // f(r, 1) = f_A + f_R
        return (alpha * r * r + beta) * fast_exp(-e_R * r) - gamma * r * fast_exp(-e_A * r);
    }

    ChannelCoeffs operator()(double r) const {
        double fR = (alpha * r * r + beta) * fast_exp(-e_R * r);
        double fA = -gamma * r * fast_exp(-e_A * r);
        double f1 = fA + fR;
        double mid = f_c1 + (r - c1) * inv_width * (-f_c2 - f_c1);
        double fl = (r < c1) ? f1 : ((r > c2) ? -f1 : mid);
        return {fl, chi * fA + fR};
    }
};

struct HarmonicEval {
    double c, c_s, c_l, e_s1, e_s2, e_l1, e_l2, pi_over_as, pi_over_al;

    explicit HarmonicEval(const HarmonicLaw& law)
        : c(law.params.c), c_s(law.params.c_s), c_l(law.params.c_l),
          e_s1(law.params.e_s1), e_s2(law.params.e_s2), e_l1(law.params.e_l1),
          e_l2(law.params.e_l2), pi_over_as(std::numbers::pi / law.params.a_s),
          pi_over_al(std::numbers::pi / law.params.a_l) {}

    ChannelCoeffs operator()(double r) const {
        double sin_s = fast_sincos(pi_over_as * r).sin;
        SinCos sc_l = fast_sincos(pi_over_al * r);
        double fs = c * fast_exp(e_s1 * r) + c_s * sin_s * fast_exp(e_s2 * r);
        double fl = c * sc_l.cos * fast_exp(e_l1 * r) + c_l * sc_l.sin * fast_exp(e_l2 * r);
        return {fl, fs};
    }
};

} // namespace detail

/// Visit the model's law with a concrete coefficient evaluator, hoisting the
/// variant dispatch out of hot loops.
template <class Fn>
decltype(auto) with_law_evaluator(const ForceModel& model, Fn&& fn) {
    return std::visit(
        [&](const auto& law) {
            using Law = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<Law, KCLaw>) return fn(detail::KCEval(law));
            else if constexpr (std::is_same_v<Law, PiecewiseLaw>) return fn(detail::PiecewiseEval(law));
            else return fn(detail::HarmonicEval(law));
        },
        model.law);
}

/// Raw law coefficients at separation r (callers pass eta * |d| themselves).
inline ChannelCoeffs coefficients(const ForceModel& model, double r) {
    if (!(r >= 0.0)) throw InputError("coefficients: separation must be nonnegative");
    return with_law_evaluator(model, [&](const auto& eval) { return eval(r); });
}

namespace detail {

/// Channel sums for one target particle over packed candidate coordinates:
///   A_s = sum_i f_s(eta r_i) * eta (s . d_i),  A_l likewise along l,
/// zero contribution for r_i >= cutoff. The coefficient math runs in a
/// vectorizable pass over scratch buffers; the final accumulation is scalar
/// in candidate order, so two evaluations that agree on the candidate values
/// (with extras only beyond the cutoff) produce bit-identical sums.
template <class LawEval>
inline Vec2 channel_sums(double xj, double yj, const Frame& frame, double eta, double cutoff,
                         const double* cand_x, const double* cand_y, int n,
                         const LawEval& law, double* scratch_s, double* scratch_l) {
    const double sx = frame.s.x, sy = frame.s.y, lx = frame.l.x, ly = frame.l.y;
    for (int i = 0; i < n; ++i) {
        double dx = xj - cand_x[i];
        dx -= std::nearbyint(dx);
        double dy = yj - cand_y[i];
        dy -= std::nearbyint(dy);
        double r = std::sqrt(dx * dx + dy * dy);
        ChannelCoeffs fc = law(eta * r);
        double ps = fc.f_s * (eta * (sx * dx + sy * dy));
        double pl = fc.f_l * (eta * (lx * dx + ly * dy));
        bool in_range = r < cutoff;
        scratch_s[i] = in_range ? ps : 0.0;
        scratch_l[i] = in_range ? pl : 0.0;
    }
    double as = 0.0, al = 0.0;
    for (int i = 0; i < n; ++i) as += scratch_s[i];
    for (int i = 0; i < n; ++i) al += scratch_l[i];
    return {as, al};
}

} // namespace detail

/// Force exerted across separation d = x_j - x_k under the frame at x_j:
///   F = f_s(eta|d|) (s . eta d) s + f_l(eta|d|) (l . eta d) l,
/// exactly zero for |d| >= cutoff. Antisymmetric in d for a fixed frame.
inline Vec2 pair_force(const ForceModel& model, TorusVector d, const Frame& frame) {
    double cx = 0.0, cy = 0.0;  // candidate at the origin, target at d
    double ss, sl;
    Vec2 a = with_law_evaluator(model, [&](const auto& eval) {
        return detail::channel_sums(d.dx, d.dy, frame, model.eta, model.cutoff,
                                    &cx, &cy, 1, eval, &ss, &sl);
    });
    return {a.x * frame.s.x + a.y * frame.l.x, a.x * frame.s.y + a.y * frame.l.y};
}

// --- presets ---------------------------------------------------------------

inline constexpr const char* kPresetNames[] = {"kc_original", "kc_stationary", "bio_harmonic",
                                               "kc_piecewise"};

/// Named parameter sets. kc_original is the initial-study parameter choice
/// (gamma = 35, long-range attractive across ridges); kc_stationary scales
/// gamma to 10.5, which keeps line patterns from collapsing; bio_harmonic is
/// the damped-oscillator law; kc_piecewise splices the kc_stationary
/// coefficients at c1 = 0.06, c2 = 0.07. All ship with eta = 1 and the
/// cell-list friendly cutoff 0.1 (override to 0.5 for steady-state checks).
inline ForceModel preset(std::string_view name) {
    ForceModel m;
    m.eta = 1.0;
    m.cutoff = 0.1;
    if (name == "kc_original") {
        m.law = KCLaw{KCParams{270.0, 0.1, 35.0, 95.0, 100.0, 0.2}, 1.0};
    } else if (name == "kc_stationary") {
        m.law = KCLaw{KCParams{270.0, 0.1, 10.5, 95.0, 100.0, 0.2}, 1.0};
    } else if (name == "bio_harmonic") {
        m.law = HarmonicLaw{HarmonicParams{}};
    } else if (name == "kc_piecewise") {
        m.law = PiecewiseLaw{KCParams{270.0, 0.1, 10.5, 95.0, 100.0, 0.2}, 0.06, 0.07};
    } else {
        std::string msg = "unknown force preset '" + std::string(name) + "'; valid names:";
        for (const char* n : kPresetNames) msg += std::string(" ") + n;
        throw ConfigError(msg);
    }
    return m;
}

/// Throw unless the model satisfies its parameter constraints.
inline void validate(const ForceModel& model) {
    if (!(model.eta > 0.0)) throw ConfigError("force.eta must be positive");
    if (!(model.cutoff > 0.0 && model.cutoff <= 0.5))
        throw ConfigError("force.cutoff must lie in (0, 0.5]");
    std::visit(
        [](const auto& law) {
            using Law = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<Law, KCLaw> || std::is_same_v<Law, PiecewiseLaw>) {
                const KCParams& p = law.params;
                if (p.alpha < 0 || p.beta < 0 || p.gamma < 0 || p.e_A < 0 || p.e_R < 0)
                    throw ConfigError("force: kc parameters must be nonnegative");
                if (!(p.chi >= 0.0 && p.chi <= 1.0))
                    throw ConfigError("force.chi must lie in [0, 1]");
            }
            if constexpr (std::is_same_v<Law, PiecewiseLaw>) {
                if (!(0.0 < law.c1 && law.c1 < law.c2 && law.c2 < 0.5))
                    throw ConfigError("force: piecewise thresholds need 0 < c1 < c2 < 0.5");
            }
            if constexpr (std::is_same_v<Law, HarmonicLaw>) {
                if (law.params.a_s == 0.0 || law.params.a_l == 0.0)
                    throw ConfigError("force: harmonic periods a_s, a_l must be nonzero");
            }
        },
        model.law);
}

} // namespace ridges
