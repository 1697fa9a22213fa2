#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ridges/direction_field.hpp"
#include "ridges/errors.hpp"
#include "ridges/force_model.hpp"
#include "ridges/io.hpp"
#include "ridges/simulator.hpp"

namespace ridges {

/// Ordered `key = value` pairs; repeated keys accumulate (used for list
/// values like field.singularity). '#' starts a comment.
struct ConfigMap {
    std::vector<std::pair<std::string, std::string>> entries;

    std::optional<std::string> get(const std::string& key) const {
        std::optional<std::string> found;
        for (const auto& [k, v] : entries)
            if (k == key) found = v;  // last occurrence wins for scalars
        return found;
    }

    std::vector<std::string> get_all(const std::string& key) const {
        std::vector<std::string> out;
        for (const auto& [k, v] : entries)
            if (k == key) out.push_back(v);
        return out;
    }

    /// Replace the value of `key` (dropping earlier occurrences) or append.
    void set(const std::string& key, const std::string& value) {
        entries.erase(std::remove_if(entries.begin(), entries.end(),
                                     [&](const auto& kv) { return kv.first == key; }),
                      entries.end());
        entries.emplace_back(key, value);
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace detail

inline ConfigMap parse_config(std::istream& in) {
    ConfigMap cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::string t = detail::trim(line);
        if (t.empty()) continue;
        auto eq = t.find('=');
        if (eq == std::string::npos) throw ParseError("expected 'key = value'", lineno);
        std::string key = detail::trim(t.substr(0, eq));
        std::string value = detail::trim(t.substr(eq + 1));
        if (key.empty()) throw ParseError("empty key", lineno);
        cfg.entries.emplace_back(key, value);
    }
    return cfg;
}

inline ConfigMap load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path.string() + "'");
    return parse_config(in);
}

/// Everything needed to execute and reproduce one simulation run.
struct RunSetup {
    SimConfig sim;
    bool svg_underlay = true;
    std::uint64_t seed = 0;          // manifest metadata; 0 for non-random inits
    std::string force_preset;        // empty when the law was given explicitly
    std::string angle_map_path;      // empty unless the field came from a file
};

namespace detail {

inline double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("invalid number '" + value + "' for " + key);
    }
}

inline long long parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        long long v = std::stoll(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("invalid integer '" + value + "' for " + key);
    }
}

inline std::vector<double> parse_doubles(const std::string& key, const std::string& value,
                                         std::size_t count) {
    std::istringstream ss(value);
    std::vector<double> vals;
    std::string tok;
    while (ss >> tok) vals.push_back(parse_double(key, tok));
    if (vals.size() != count)
        throw ConfigError(key + ": expected " + std::to_string(count) + " numbers, got " +
                          std::to_string(vals.size()));
    return vals;
}

inline const std::set<std::string>& known_config_keys() {
    static const std::set<std::string> keys = {
        "n_particles", "dt", "t_end", "integrator", "neighbor", "snapshot_interval",
        "stop.epsilon", "stop.window",
        "init.type", "init.seed", "init.center", "init.radius", "init.n_lines",
        "force.preset", "force.law", "force.eta", "force.cutoff",
        "force.alpha", "force.beta", "force.gamma", "force.e_A", "force.e_R", "force.chi",
        "force.attraction_scale_l", "force.c1", "force.c2",
        "force.c", "force.c_s", "force.c_l", "force.e_s1", "force.e_s2", "force.e_l1",
        "force.e_l2", "force.a_s", "force.a_l",
        "field.type", "field.theta0", "field.singularity", "field.rect", "field.angle_map",
        "output.underlay",
    };
    return keys;
}

} // namespace detail

/// Validate keys and assemble a runnable setup. Relative angle-map paths
/// resolve against base_dir.
inline RunSetup build_run_setup(const ConfigMap& cfg, const std::filesystem::path& base_dir = ".") {
    for (const auto& [k, v] : cfg.entries)
        if (!detail::known_config_keys().count(k))
            throw ConfigError("unknown config key '" + k + "'");

    RunSetup setup;
    SimConfig& sim = setup.sim;

    if (auto v = cfg.get("n_particles")) sim.n_particles = static_cast<int>(detail::parse_int("n_particles", *v));
    if (auto v = cfg.get("dt")) sim.dt = detail::parse_double("dt", *v);
    if (auto v = cfg.get("t_end")) sim.t_end = detail::parse_double("t_end", *v);
    if (auto v = cfg.get("snapshot_interval"))
        sim.snapshot_interval = detail::parse_double("snapshot_interval", *v);
    if (auto v = cfg.get("stop.epsilon")) sim.stop_epsilon = detail::parse_double("stop.epsilon", *v);
    if (auto v = cfg.get("stop.window"))
        sim.stop_window = static_cast<int>(detail::parse_int("stop.window", *v));
    if (auto v = cfg.get("integrator")) {
        if (*v == "euler") sim.integrator = Integrator::euler;
        else if (*v == "rkdp") sim.integrator = Integrator::rkdp;
        else throw ConfigError("integrator: expected 'euler' or 'rkdp', got '" + *v + "'");
    }
    if (auto v = cfg.get("neighbor")) {
        if (*v == "direct") sim.neighbor = NeighborMode::direct;
        else if (*v == "cell_list") sim.neighbor = NeighborMode::cell_list;
        else throw ConfigError("neighbor: expected 'direct' or 'cell_list', got '" + *v + "'");
    }
    if (auto v = cfg.get("output.underlay")) {
        if (*v == "true" || *v == "1") setup.svg_underlay = true;
        else if (*v == "false" || *v == "0") setup.svg_underlay = false;
        else throw ConfigError("output.underlay: expected true/false, got '" + *v + "'");
    }

    // initial condition
    std::string init_type = cfg.get("init.type").value_or("uniform");
    if (init_type == "uniform") {
        UniformInit u;
        if (auto v = cfg.get("init.seed"))
            u.seed = static_cast<std::uint64_t>(detail::parse_int("init.seed", *v));
        setup.seed = u.seed;
        sim.init = u;
    } else if (init_type == "circle") {
        CircleInit c;
        if (auto v = cfg.get("init.center")) {
            auto xy = detail::parse_doubles("init.center", *v, 2);
            c.center = {xy[0], xy[1]};
        }
        if (auto v = cfg.get("init.radius")) c.radius = detail::parse_double("init.radius", *v);
        sim.init = c;
    } else if (init_type == "lines") {
        LinesInit l;
        if (auto v = cfg.get("init.n_lines"))
            l.n_lines = static_cast<int>(detail::parse_int("init.n_lines", *v));
        sim.init = l;
    } else {
        throw ConfigError("init.type: expected uniform, circle or lines, got '" + init_type + "'");
    }

    // force model: preset or explicit law, then parameter overrides
    auto preset_name = cfg.get("force.preset");
    auto law_name = cfg.get("force.law");
    if (preset_name) {
        sim.force = preset(*preset_name);
        setup.force_preset = *preset_name;
    } else if (law_name) {
        if (*law_name == "kc") sim.force.law = KCLaw{};
        else if (*law_name == "piecewise") sim.force.law = PiecewiseLaw{};
        else if (*law_name == "harmonic") sim.force.law = HarmonicLaw{};
        else throw ConfigError("force.law: expected kc, piecewise or harmonic, got '" + *law_name + "'");
    } else {
        throw ConfigError("config must set force.preset or force.law");
    }
    if (auto v = cfg.get("force.eta")) sim.force.eta = detail::parse_double("force.eta", *v);
    if (auto v = cfg.get("force.cutoff")) sim.force.cutoff = detail::parse_double("force.cutoff", *v);

    auto kc_param = [&](const std::string& key, auto member) {
        if (auto v = cfg.get(key)) {
            double d = detail::parse_double(key, *v);
            if (auto* kc = std::get_if<KCLaw>(&sim.force.law)) kc->params.*member = d;
            else if (auto* pw = std::get_if<PiecewiseLaw>(&sim.force.law)) pw->params.*member = d;
            else throw ConfigError(key + " only applies to the kc/piecewise laws");
        }
    };
    kc_param("force.alpha", &KCParams::alpha);
    kc_param("force.beta", &KCParams::beta);
    kc_param("force.gamma", &KCParams::gamma);
    kc_param("force.e_A", &KCParams::e_A);
    kc_param("force.e_R", &KCParams::e_R);
    kc_param("force.chi", &KCParams::chi);
    if (auto v = cfg.get("force.attraction_scale_l")) {
        if (auto* kc = std::get_if<KCLaw>(&sim.force.law))
            kc->attraction_scale_l = detail::parse_double("force.attraction_scale_l", *v);
        else throw ConfigError("force.attraction_scale_l only applies to the kc law");
    }
    auto pw_param = [&](const std::string& key, double PiecewiseLaw::* member) {
        if (auto v = cfg.get(key)) {
            if (auto* pw = std::get_if<PiecewiseLaw>(&sim.force.law))
                pw->*member = detail::parse_double(key, *v);
            else throw ConfigError(key + " only applies to the piecewise law");
        }
    };
    pw_param("force.c1", &PiecewiseLaw::c1);
    pw_param("force.c2", &PiecewiseLaw::c2);
    auto h_param = [&](const std::string& key, double HarmonicParams::* member) {
        if (auto v = cfg.get(key)) {
            if (auto* h = std::get_if<HarmonicLaw>(&sim.force.law))
                h->params.*member = detail::parse_double(key, *v);
            else throw ConfigError(key + " only applies to the harmonic law");
        }
    };
    h_param("force.c", &HarmonicParams::c);
    h_param("force.c_s", &HarmonicParams::c_s);
    h_param("force.c_l", &HarmonicParams::c_l);
    h_param("force.e_s1", &HarmonicParams::e_s1);
    h_param("force.e_s2", &HarmonicParams::e_s2);
    h_param("force.e_l1", &HarmonicParams::e_l1);
    h_param("force.e_l2", &HarmonicParams::e_l2);
    h_param("force.a_s", &HarmonicParams::a_s);
    h_param("force.a_l", &HarmonicParams::a_l);

    // direction field
    std::string field_type = cfg.get("field.type").value_or("homogeneous");
    double theta0 = std::numbers::pi / 2;
    if (auto v = cfg.get("field.theta0")) theta0 = detail::parse_double("field.theta0", *v);
    if (field_type == "homogeneous") {
        sim.field = DirectionField::homogeneous(theta0);
    } else if (field_type == "singularities") {
        std::vector<Singularity> sings;
        for (const std::string& spec : cfg.get_all("field.singularity")) {
            std::istringstream ss(spec);
            std::string kind;
            double x, y;
            if (!(ss >> kind >> x >> y) || (kind != "core" && kind != "delta"))
                throw ConfigError("field.singularity: expected 'core|delta x y', got '" + spec + "'");
            sings.push_back({wrap({x, y}),
                             kind == "core" ? SingularityKind::core : SingularityKind::delta});
        }
        if (sings.empty()) throw ConfigError("field.type singularities needs field.singularity entries");
        sim.field = DirectionField::singular(std::move(sings), theta0);
    } else if (field_type == "piecewise") {
        std::vector<PiecewiseRect> rects;
        for (const std::string& spec : cfg.get_all("field.rect")) {
            auto vals = detail::parse_doubles("field.rect", spec, 5);
            rects.push_back({vals[0], vals[1], vals[2], vals[3], vals[4]});
        }
        if (rects.empty()) throw ConfigError("field.type piecewise needs field.rect entries");
        sim.field = DirectionField::piecewise(std::move(rects));
    } else if (field_type == "angle_map") {
        auto path = cfg.get("field.angle_map");
        if (!path) throw ConfigError("field.type angle_map needs field.angle_map = <path>");
        std::filesystem::path p(*path);
        if (p.is_relative()) p = base_dir / p;
        std::ifstream in(p);
        if (!in) throw IoError("cannot open angle map '" + p.string() + "'");
        sim.field = DirectionField::angle_map(load_angle_map(in));
        setup.angle_map_path = std::filesystem::absolute(p).string();
    } else {
        throw ConfigError("field.type: expected homogeneous, singularities, piecewise or "
                          "angle_map, got '" + field_type + "'");
    }

    validate(sim);
    return setup;
}

/// Canonical, fully resolved config for the manifest; parsing it back yields
/// an identical run (numbers round-trip via %.17g).
inline ConfigMap emit_config(const RunSetup& setup) {
    const SimConfig& sim = setup.sim;
    ConfigMap out;
    auto put = [&](const std::string& k, const std::string& v) { out.entries.emplace_back(k, v); };
    auto putd = [&](const std::string& k, double v) { put(k, detail::fmt_g(v)); };
    put("n_particles", std::to_string(sim.n_particles));
    putd("dt", sim.dt);
    putd("t_end", sim.t_end);
    put("integrator", sim.integrator == Integrator::euler ? "euler" : "rkdp");
    put("neighbor", sim.neighbor == NeighborMode::direct ? "direct" : "cell_list");
    if (sim.snapshot_interval != 0.0) putd("snapshot_interval", sim.snapshot_interval);
    if (sim.stop_epsilon != 0.0) {
        putd("stop.epsilon", sim.stop_epsilon);
        put("stop.window", std::to_string(sim.stop_window));
    }

    if (const auto* u = std::get_if<UniformInit>(&sim.init)) {
        put("init.type", "uniform");
        put("init.seed", std::to_string(u->seed));
    } else if (const auto* c = std::get_if<CircleInit>(&sim.init)) {
        put("init.type", "circle");
        put("init.center", detail::fmt_g(c->center.x) + " " + detail::fmt_g(c->center.y));
        putd("init.radius", c->radius);
    } else {
        put("init.type", "lines");
        put("init.n_lines", std::to_string(std::get<LinesInit>(sim.init).n_lines));
    }

    if (const auto* kc = std::get_if<KCLaw>(&sim.force.law)) {
        put("force.law", "kc");
        putd("force.alpha", kc->params.alpha);
        putd("force.beta", kc->params.beta);
        putd("force.gamma", kc->params.gamma);
        putd("force.e_A", kc->params.e_A);
        putd("force.e_R", kc->params.e_R);
        putd("force.chi", kc->params.chi);
        putd("force.attraction_scale_l", kc->attraction_scale_l);
    } else if (const auto* pw = std::get_if<PiecewiseLaw>(&sim.force.law)) {
        put("force.law", "piecewise");
        putd("force.alpha", pw->params.alpha);
        putd("force.beta", pw->params.beta);
        putd("force.gamma", pw->params.gamma);
        putd("force.e_A", pw->params.e_A);
        putd("force.e_R", pw->params.e_R);
        putd("force.chi", pw->params.chi);
        putd("force.c1", pw->c1);
        putd("force.c2", pw->c2);
    } else {
        const auto& h = std::get<HarmonicLaw>(sim.force.law).params;
        put("force.law", "harmonic");
        putd("force.c", h.c);
        putd("force.c_s", h.c_s);
        putd("force.c_l", h.c_l);
        putd("force.e_s1", h.e_s1);
        putd("force.e_s2", h.e_s2);
        putd("force.e_l1", h.e_l1);
        putd("force.e_l2", h.e_l2);
        putd("force.a_s", h.a_s);
        putd("force.a_l", h.a_l);
    }
    putd("force.eta", sim.force.eta);
    putd("force.cutoff", sim.force.cutoff);

    sim.field.describe([&](const std::string& key, const std::string& value) { put(key, value); },
                       setup.angle_map_path);
    if (!setup.svg_underlay) put("output.underlay", "false");
    return out;
}

} // namespace ridges
