#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ridges/analysis.hpp"
#include "ridges/direction_field.hpp"
#include "ridges/errors.hpp"
#include "ridges/force_model.hpp"
#include "ridges/simulator.hpp"

namespace ridges {

namespace detail {

inline std::string fmt_g(double v, int digits = 17) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    return out;
}

} // namespace detail

/// Refuse to reuse an existing non-empty directory unless forced.
inline void prepare_run_dir(const std::filesystem::path& dir, bool force) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (fs::exists(dir, ec)) {
        if (!fs::is_directory(dir, ec))
            throw IoError("output path '" + dir.string() + "' exists and is not a directory");
        if (!fs::is_empty(dir, ec) && !force)
            throw IoError("output directory '" + dir.string() +
                          "' already exists; pass --force to overwrite");
    }
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "'");
}

// --- CSV -------------------------------------------------------------------

inline void write_snapshot_csv(const std::filesystem::path& path, double t,
                               const ParticleState& st) {
    auto out = detail::open_out(path);
    out << "t,id,x,y\n";
    std::string ts = detail::fmt_g(t, 15);
    for (int j = 0; j < st.size(); ++j)
        out << ts << ',' << j << ',' << detail::fmt_g(st.x[j]) << ',' << detail::fmt_g(st.y[j])
            << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

/// Read back one snapshot CSV; returns the snapshot time and state.
inline std::pair<double, ParticleState> read_snapshot_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line) || line != "t,id,x,y")
        throw ParseError("snapshot CSV missing 't,id,x,y' header", 1);
    ParticleState st;
    double t = 0.0;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tok;
        double vals[4];
        for (int c = 0; c < 4; ++c) {
            if (!std::getline(ls, tok, c < 3 ? ',' : '\n'))
                throw ParseError("snapshot CSV: expected 4 fields", lineno);
            try {
                vals[c] = std::stod(tok);
            } catch (const std::exception&) {
                throw ParseError("snapshot CSV: bad number '" + tok + "'", lineno);
            }
        }
        t = vals[0];
        st.x.push_back(vals[2]);
        st.y.push_back(vals[3]);
    }
    st.time = t;
    return {t, st};
}

inline void write_tau_csv(const std::filesystem::path& path,
                          const std::vector<std::pair<double, double>>& series) {
    auto out = detail::open_out(path);
    out << "t,tau\n";
    for (const auto& [t, tv] : series)
        out << detail::fmt_g(t, 15) << ',' << detail::fmt_g(tv) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

inline std::vector<std::pair<double, double>> read_tau_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line) || line != "t,tau")
        throw ParseError("tau CSV missing 't,tau' header", 1);
    std::vector<std::pair<double, double>> series;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError("tau CSV: expected 2 fields", lineno);
        try {
            series.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw ParseError("tau CSV: bad number", lineno);
        }
    }
    return series;
}

/// Coefficient curves f_l, f_s sampled on [0, 0.5] for plotting.
inline void write_coefficient_csv(const std::filesystem::path& path, const ForceModel& model,
                                  int samples = 501) {
    auto out = detail::open_out(path);
    out << "r,f_l,f_s\n";
    for (int i = 0; i < samples; ++i) {
        double r = 0.5 * i / (samples - 1);
        ChannelCoeffs c = coefficients(model, r);
        out << detail::fmt_g(r, 15) << ',' << detail::fmt_g(c.f_l) << ',' << detail::fmt_g(c.f_s)
            << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

// --- SVG ---------------------------------------------------------------

/// Minimal SVG assembler over the unit square; y points up in domain
/// coordinates and is flipped for screen space.
class SvgCanvas {
  public:
    SvgCanvas() {
        body_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
              << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"640\" "
                 "viewBox=\"0 0 1000 1000\">\n"
              << "<rect x=\"0\" y=\"0\" width=\"1000\" height=\"1000\" fill=\"white\" "
                 "stroke=\"#999\" stroke-width=\"1\"/>\n";
    }

    void dot(double x, double y, double radius, const std::string& color) {
        body_ << "<circle cx=\"" << coord(x) << "\" cy=\"" << coord(1.0 - y) << "\" r=\"" << radius
              << "\" fill=\"" << color << "\"/>\n";
    }

    void polyline(const std::vector<Vec2>& pts, const std::string& color, double width) {
        if (pts.size() < 2) return;
        body_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << width
              << "\" points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i) body_ << ' ';
            body_ << coord(pts[i].x) << ',' << coord(1.0 - pts[i].y);
        }
        body_ << "\"/>\n";
    }

    void save(const std::filesystem::path& path) {
        auto out = detail::open_out(path);
        out << body_.str() << "</svg>\n";
        if (!out) throw IoError("write failed: " + path.string());
    }

  private:
    static std::string coord(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", 1000.0 * v);
        return buf;
    }
    std::ostringstream body_;
};

/// Streamlines of the ridge direction traced from a seed lattice.
inline void draw_field_streamlines(SvgCanvas& svg, const DirectionField& field, int lattice = 24,
                                   double step = 0.004, int n_steps = 250,
                                   const std::string& color = "#c8c8c8", double width = 1.0) {
    for (int a = 0; a < lattice; ++a) {
        for (int b = 0; b < lattice; ++b) {
            TorusPoint seed{(a + 0.5) / lattice, (b + 0.5) / lattice};
            svg.polyline(trace_streamline(field, seed, step, n_steps, +1), color, width);
            svg.polyline(trace_streamline(field, seed, step, n_steps, -1), color, width);
        }
    }
}

inline void write_snapshot_svg(const std::filesystem::path& path, const ParticleState& st,
                               const DirectionField* underlay = nullptr) {
    SvgCanvas svg;
    if (underlay) draw_field_streamlines(svg, *underlay, 16, 0.005, 200, "#e0e0e0", 0.8);
    for (int j = 0; j < st.size(); ++j) svg.dot(st.x[j], st.y[j], 2.5, "#1f4e79");
    svg.save(path);
}

inline void write_field_svg(const std::filesystem::path& path, const DirectionField& field) {
    SvgCanvas svg;
    draw_field_streamlines(svg, field, 28, 0.003, 400, "#3a6ea5", 1.2);
    svg.save(path);
}

/// Orientation angles sampled at cell centers of a w x h grid.
inline void write_theta_grid_csv(const std::filesystem::path& path, const DirectionField& field,
                                 int w, int h) {
    auto out = detail::open_out(path);
    out << "x,y,theta\n";
    for (int j = 0; j < h; ++j) {
        for (int i = 0; i < w; ++i) {
            TorusPoint p{(i + 0.5) / w, (j + 0.5) / h};
            double theta;
            try {
                theta = field.theta_at(p);
            } catch (const SingularityError&) {
                continue;  // skip the singular sample
            }
            out << detail::fmt_g(p.x, 15) << ',' << detail::fmt_g(p.y, 15) << ','
                << detail::fmt_g(theta) << '\n';
        }
    }
    if (!out) throw IoError("write failed: " + path.string());
}

// --- manifest ----------------------------------------------------------

inline void write_key_values(const std::filesystem::path& path,
                             const std::vector<std::pair<std::string, std::string>>& entries) {
    auto out = detail::open_out(path);
    for (const auto& [k, v] : entries) out << k << " = " << v << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

} // namespace ridges
