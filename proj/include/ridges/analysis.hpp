#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "ridges/direction_field.hpp"
#include "ridges/errors.hpp"
#include "ridges/geometry.hpp"
#include "ridges/simulator.hpp"

namespace ridges {

/// Default circular-gap threshold separating distinct ridge lines from
/// intra-ridge jitter at the particle counts used here.
inline constexpr double kDefaultGapThreshold = 0.02;

/// Parallel-line pattern summary: projected line centers in [0,1) and the
/// circular gaps between consecutive centers (gaps sum to 1 when there are
/// at least two lines).
struct LinePattern {
    int n_lines = 0;
    std::vector<double> centers;
    std::vector<double> spacings;
};

struct RadialProfile {
    TorusPoint center;
    double mean_radius = 0.0;
    double std_radius = 0.0;
    double max_pairwise_distance = 0.0;
};

/// Largest net-force magnitude over all particles; zero (to rounding) at a
/// steady state.
inline double static_residual(const ParticleState& st, const ForceModel& force,
                              const DirectionField& field) {
    std::vector<Vec2> f = net_forces_cell_list(st, force, field);
    double worst = 0.0;
    for (const Vec2& v : f) worst = std::max(worst, std::sqrt(v.x * v.x + v.y * v.y));
    return worst;
}

/// Count ridge lines of a (locally) homogeneous pattern whose ridge
/// direction makes angle `direction_angle` with the x axis. Particles are
/// projected onto the orthogonal axis modulo 1, sorted circularly, and split
/// into clusters wherever a circular gap exceeds gap_threshold.
inline LinePattern count_lines(const ParticleState& st, double direction_angle,
                               double gap_threshold = kDefaultGapThreshold) {
    if (!(gap_threshold > 0.0 && gap_threshold < 0.5))
        throw InputError("count_lines: gap_threshold must lie in (0, 0.5)");
    const int n = st.size();
    Vec2 l{-std::sin(direction_angle), std::cos(direction_angle)};
    std::vector<double> proj(n);
    for (int j = 0; j < n; ++j)
        proj[j] = detail::wrap_unit(l.x * st.x[j] + l.y * st.y[j]);
    std::sort(proj.begin(), proj.end());

    // circular gaps after each sorted value; the last wraps around
    int first_break = -1;
    for (int i = 0; i < n; ++i) {
        double gap = (i + 1 < n) ? proj[i + 1] - proj[i] : proj[0] + 1.0 - proj[n - 1];
        if (gap > gap_threshold) {
            first_break = i;
            break;
        }
    }
    LinePattern pat;
    if (first_break < 0) {  // no gap anywhere: one smeared cluster
        pat.n_lines = 1;
        double mean = 0.0;
        for (double p : proj) mean += p;  // arbitrary representative center
        pat.centers.push_back(detail::wrap_unit(mean / n));
        return pat;
    }
    // walk clusters starting just after the first break so none straddles the seam
    double origin = proj[first_break];
    std::vector<double> shifted(n);
    for (int i = 0; i < n; ++i)
        shifted[i] = proj[(first_break + 1 + i) % n] - origin;
    for (double& v : shifted)
        if (v < 0.0) v += 1.0;
    std::vector<double> centers;
    double cluster_sum = shifted[0];
    int cluster_count = 1;
    for (int i = 1; i < n; ++i) {
        if (shifted[i] - shifted[i - 1] > gap_threshold) {
            centers.push_back(detail::wrap_unit(cluster_sum / cluster_count + origin));
            cluster_sum = 0.0;
            cluster_count = 0;
        }
        cluster_sum += shifted[i];
        ++cluster_count;
    }
    centers.push_back(detail::wrap_unit(cluster_sum / cluster_count + origin));
    std::sort(centers.begin(), centers.end());
    pat.n_lines = static_cast<int>(centers.size());
    pat.centers = std::move(centers);
    if (pat.n_lines >= 2) {
        for (int i = 0; i < pat.n_lines; ++i) {
            double next = (i + 1 < pat.n_lines) ? pat.centers[i + 1] : pat.centers[0] + 1.0;
            pat.spacings.push_back(next - pat.centers[i]);
        }
    }
    return pat;
}

/// Mean and standard deviation of the circular gaps between line centers.
inline std::pair<double, double> ridge_spacing(const LinePattern& pat) {
    if (pat.n_lines < 2) throw InputError("ridge_spacing: need at least two lines");
    double mean = 0.0;
    for (double s : pat.spacings) mean += s;
    mean /= pat.spacings.size();
    double var = 0.0;
    for (double s : pat.spacings) var += (s - mean) * (s - mean);
    var /= pat.spacings.size();
    return {mean, std::sqrt(var)};
}

/// Minimum-image distance statistics about a center, plus the largest
/// pairwise particle separation (distinguishes a tight ring from a spread
/// cloud).
inline RadialProfile radial_profile(const ParticleState& st, TorusPoint center) {
    const int n = st.size();
    RadialProfile prof;
    prof.center = center;
    double sum = 0.0, sum2 = 0.0;
    for (int j = 0; j < n; ++j) {
        double d = distance(st.point(j), center);
        sum += d;
        sum2 += d * d;
    }
    prof.mean_radius = sum / n;
    prof.std_radius = std::sqrt(std::max(0.0, sum2 / n - prof.mean_radius * prof.mean_radius));
    double worst = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            worst = std::max(worst, distance(st.point(a), st.point(b)));
    prof.max_pairwise_distance = worst;
    return prof;
}

/// Count ridges crossing a thin probe strip: particles within the strip
/// (half_length along probe_dir, half_thickness across it, minimum-image
/// relative to center) are projected onto probe_dir and split at gaps larger
/// than gap_threshold; clusters with at least min_points count as ridges.
/// Keeping the strip thin makes this usable where the field is only locally
/// homogeneous.
inline int strip_crossing_count(const ParticleState& st, TorusPoint center, Vec2 probe_dir,
                                double half_length, double half_thickness,
                                double gap_threshold = kDefaultGapThreshold, int min_points = 2) {
    double nrm = norm(probe_dir);
    if (!(nrm > 0.0)) throw InputError("strip_crossing_count: zero probe direction");
    Vec2 u{probe_dir.x / nrm, probe_dir.y / nrm};
    Vec2 v{-u.y, u.x};
    std::vector<double> along;
    for (int j = 0; j < st.size(); ++j) {
        TorusVector d = displacement(st.point(j), center);
        double a = u.x * d.dx + u.y * d.dy;
        double b = v.x * d.dx + v.y * d.dy;
        if (std::abs(a) <= half_length && std::abs(b) <= half_thickness) along.push_back(a);
    }
    std::sort(along.begin(), along.end());
    int clusters = 0, pts = 0;
    for (std::size_t i = 0; i < along.size(); ++i) {
        if (i > 0 && along[i] - along[i - 1] > gap_threshold) {
            if (pts >= min_points) ++clusters;
            pts = 0;
        }
        ++pts;
    }
    if (pts >= min_points) ++clusters;
    return clusters;
}

} // namespace ridges
