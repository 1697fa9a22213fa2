#pragma once

#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "ridges/analysis.hpp"
#include "ridges/config.hpp"
#include "ridges/errors.hpp"
#include "ridges/io.hpp"
#include "ridges/parallel.hpp"
#include "ridges/simulator.hpp"
#include "ridges/version.hpp"

namespace ridges {

namespace detail {

inline std::string timestamp_utc() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline std::string snapshot_stem(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "snapshot_%04zu", index);
    return buf;
}

} // namespace detail

struct RunArtifacts {
    std::filesystem::path dir;
    RunReport report;
};

/// Execute one configured run and write its artifact set: manifest.txt with
/// the fully resolved config, one CSV + SVG per snapshot, and tau.csv.
inline RunArtifacts execute_run(const RunSetup& setup, const std::filesystem::path& out_dir,
                                bool force, const std::string& preset_label = "",
                                const std::string& config_path = "") {
    prepare_run_dir(out_dir, force);
    RunArtifacts artifacts;
    artifacts.dir = out_dir;
    artifacts.report = run(setup.sim);
    const RunReport& report = artifacts.report;

    std::vector<std::pair<std::string, std::string>> manifest;
    manifest.emplace_back("artifact", std::string("ridgesim ") + kVersion);
    manifest.emplace_back("created_at", detail::timestamp_utc());
    manifest.emplace_back("config_path", config_path.empty() ? "(inline)" : config_path);
    manifest.emplace_back("output_dir", out_dir.string());
    if (!preset_label.empty()) manifest.emplace_back("preset", preset_label);
    manifest.emplace_back("seed", std::to_string(setup.seed));
    manifest.emplace_back("complete", report.complete ? "true" : "false");
    if (!report.error.empty()) manifest.emplace_back("error", report.error);
    manifest.emplace_back("wall_time_seconds", detail::fmt_g(report.wall_time_seconds, 6));
    for (const auto& [k, v] : emit_config(setup).entries) manifest.emplace_back("config." + k, v);
    write_key_values(out_dir / "manifest.txt", manifest);

    for (std::size_t i = 0; i < report.snapshots.size(); ++i) {
        const auto& [t, state] = report.snapshots[i];
        std::string stem = detail::snapshot_stem(i);
        write_snapshot_csv(out_dir / (stem + ".csv"), t, state);
        write_snapshot_svg(out_dir / (stem + ".svg"), state,
                           setup.svg_underlay ? &setup.sim.field : nullptr);
    }
    write_tau_csv(out_dir / "tau.csv", report.tau_series);
    return artifacts;
}

/// Flat key=value diagnostics of a final state; line metrics only appear for
/// homogeneous fields, where the projection is meaningful.
inline std::vector<std::pair<std::string, std::string>> analysis_summary(
    const RunSetup& setup, const ParticleState& final_state,
    const std::vector<std::pair<double, double>>& tau_series) {
    std::vector<std::pair<std::string, std::string>> out;
    auto putd = [&](const std::string& k, double v) { out.emplace_back(k, detail::fmt_g(v)); };
    out.emplace_back("n_particles", std::to_string(final_state.size()));
    putd("t_final", final_state.time);
    double ft = tau_series.empty() ? 0.0 : tau_series.back().second;
    putd("final_tau", ft);
    putd("final_tau_per_n", ft / final_state.size());
    RadialProfile prof = radial_profile(final_state, {0.5, 0.5});
    putd("mean_radius", prof.mean_radius);
    putd("std_radius", prof.std_radius);
    putd("max_pairwise_distance", prof.max_pairwise_distance);
    if (prof.mean_radius > 0.0) putd("radial_cv", prof.std_radius / prof.mean_radius);
    if (setup.sim.field.is_homogeneous()) {
        LinePattern pat = count_lines(final_state, setup.sim.field.homogeneous_theta());
        out.emplace_back("n_lines", std::to_string(pat.n_lines));
        if (pat.n_lines >= 2) {
            auto [mean, sd] = ridge_spacing(pat);
            putd("mean_spacing", mean);
            putd("std_spacing", sd);
        }
    }
    return out;
}

struct ExperimentPoint {
    std::string label;
    std::string param_name;
    double param_value = 0.0;
    ConfigMap config;
};

struct ExperimentPlan {
    std::string name;
    std::vector<ExperimentPoint> points;
};

inline constexpr const char* kExperimentNames[] = {"delta_sweep", "kc_collapse",
                                                   "stationary_delta_core", "eta_sweep",
                                                   "cutoff_sweep"};

/// Fixed seed shared by the experiment presets so reruns are comparable.
inline constexpr std::uint64_t kExperimentSeed = 20250810;

/// Named experiment presets.
///
/// delta_sweep        isotropic attraction-strength sweep (chi = 1, circle
///                    start, cutoff 0.5): delta scales the attraction in both
///                    channels via the multiplicative gamma.
/// kc_collapse        original parameters over a single-delta field; the
///                    line pattern coarsens over time.
/// stationary_delta_core  reduced-attraction parameters over delta and core
///                    fields; patterns persist.
/// eta_sweep          harmonic law at several force rescalings; larger eta
///                    gives tighter ridge spacing.
/// cutoff_sweep       interaction range study on the delta field.
inline ExperimentPlan experiment_plan(
    const std::string& name,
    const std::vector<std::pair<std::string, std::string>>& overrides = {}) {
    ExperimentPlan plan;
    plan.name = name;
    auto base = [](std::initializer_list<std::pair<const char*, std::string>> kv) {
        ConfigMap m;
        for (const auto& [k, v] : kv) m.entries.emplace_back(k, v);
        return m;
    };
    auto num = [](double v) { return detail::fmt_g(v); };

    if (name == "delta_sweep") {
        for (double delta : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            ConfigMap m = base({{"n_particles", "600"},
                                {"dt", "0.2"},
                                {"t_end", "20000"},
                                {"snapshot_interval", "5000"},
                                {"integrator", "euler"},
                                {"neighbor", "direct"},
                                {"init.type", "circle"},
                                {"init.center", "0.5 0.5"},
                                {"init.radius", "0.005"},
                                {"force.preset", "kc_original"},
                                {"force.chi", "1"},
                                {"force.gamma", num(35.0 * delta)},
                                {"force.cutoff", "0.5"},
                                {"field.type", "homogeneous"},
                                {"field.theta0", num(std::numbers::pi / 2)}});
            plan.points.push_back({"delta_" + num(delta), "delta", delta, std::move(m)});
        }
    } else if (name == "kc_collapse" || name == "stationary_delta_core") {
        bool collapse = name == "kc_collapse";
        std::vector<std::pair<std::string, std::string>> fields;
        if (collapse) fields = {{"delta", "delta 0.5 0.5"}};
        else fields = {{"delta", "delta 0.5 0.5"}, {"core", "core 0.5 0.5"}};
        for (const auto& [label, sing] : fields) {
            ConfigMap m = base({{"n_particles", "600"},
                                {"dt", "0.2"},
                                {"t_end", "400000"},
                                {"snapshot_interval", "40000"},
                                {"integrator", "euler"},
                                {"neighbor", "cell_list"},
                                {"init.type", "uniform"},
                                {"init.seed", std::to_string(kExperimentSeed)},
                                {"force.preset", collapse ? "kc_original" : "kc_stationary"},
                                {"force.cutoff", "0.1"},
                                {"field.type", "singularities"},
                                {"field.theta0", "0"},
                                {"field.singularity", sing}});
            plan.points.push_back({label, "field", 0.0, std::move(m)});
        }
    } else if (name == "eta_sweep") {
        for (double eta : {0.6, 0.8, 1.0, 1.2}) {
            ConfigMap m = base({{"n_particles", "2400"},
                                {"dt", "0.2"},
                                {"t_end", "20000"},
                                {"snapshot_interval", "10000"},
                                {"integrator", "euler"},
                                {"neighbor", "cell_list"},
                                {"init.type", "uniform"},
                                {"init.seed", std::to_string(kExperimentSeed)},
                                {"force.preset", "bio_harmonic"},
                                {"force.eta", num(eta)},
                                {"force.cutoff", "0.1"},
                                {"field.type", "homogeneous"},
                                {"field.theta0", num(std::numbers::pi / 2)}});
            plan.points.push_back({"eta_" + num(eta), "eta", eta, std::move(m)});
        }
    } else if (name == "cutoff_sweep") {
        for (double cutoff : {0.02, 0.04, 0.06}) {
            ConfigMap m = base({{"n_particles", "600"},
                                {"dt", "0.2"},
                                {"t_end", "60000"},
                                {"snapshot_interval", "20000"},
                                {"integrator", "euler"},
                                {"neighbor", "cell_list"},
                                {"init.type", "uniform"},
                                {"init.seed", std::to_string(kExperimentSeed)},
                                {"force.preset", "kc_original"},
                                {"force.cutoff", num(cutoff)},
                                {"field.type", "singularities"},
                                {"field.theta0", "0"},
                                {"field.singularity", "delta 0.5 0.5"}});
            plan.points.push_back({"cutoff_" + num(cutoff), "cutoff", cutoff, std::move(m)});
        }
    } else {
        std::string msg = "unknown experiment '" + name + "'; valid names:";
        for (const char* n : kExperimentNames) msg += std::string(" ") + n;
        throw ConfigError(msg);
    }

    for (auto& point : plan.points)
        for (const auto& [k, v] : overrides) point.config.set(k, v);
    return plan;
}

/// Run every sweep point (in parallel), writing per-point artifact
/// directories plus a cross-point analysis.csv.
inline void run_experiment(const ExperimentPlan& plan, const std::filesystem::path& out_dir,
                           bool force) {
    prepare_run_dir(out_dir, force);
    const int n = static_cast<int>(plan.points.size());
    std::vector<std::vector<std::pair<std::string, std::string>>> summaries(n);
    std::vector<bool> complete(n, true);

    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto work = [&] {
        int i;
        while ((i = next.fetch_add(1)) < n) {
            try {
                const ExperimentPoint& point = plan.points[i];
                RunSetup setup = build_run_setup(point.config);
                RunArtifacts art =
                    execute_run(setup, out_dir / point.label, force, plan.name);
                complete[i] = art.report.complete;
                const ParticleState& final_state = art.report.snapshots.back().second;
                summaries[i] = analysis_summary(setup, final_state, art.report.tau_series);
                write_key_values(art.dir / "analysis.txt", summaries[i]);
            } catch (...) {
                std::lock_guard lk(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    int threads = std::min(max_threads(), n);
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);

    // cross-point CSV: stable column set keyed by run label
    const char* cols[] = {"n_particles", "t_final", "final_tau", "final_tau_per_n",
                          "mean_radius", "std_radius", "max_pairwise_distance", "radial_cv",
                          "n_lines", "mean_spacing", "std_spacing"};
    auto out = detail::open_out(out_dir / "analysis.csv");
    out << "run,param,value";
    for (const char* c : cols) out << ',' << c;
    out << '\n';
    for (int i = 0; i < n; ++i) {
        const ExperimentPoint& point = plan.points[i];
        out << point.label << ',' << point.param_name << ',' << detail::fmt_g(point.param_value, 15);
        for (const char* c : cols) {
            out << ',';
            for (const auto& [k, v] : summaries[i])
                if (k == c) {
                    out << v;
                    break;
                }
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + (out_dir / "analysis.csv").string());
}

} // namespace ridges
