// ridgesim: simulate anisotropic cell-interaction dynamics on the unit
// torus, render orientation fields, and reproduce the packaged experiments.
//
// Exit codes: 0 success, 2 configuration error, 3 diverged run, 4 I/O error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ridges/ridges.hpp"

namespace fs = std::filesystem;

namespace {

int cmd_simulate(const std::string& config_path, std::string out_dir, bool force) {
    ridges::ConfigMap cfg = ridges::load_config(config_path);
    ridges::RunSetup setup = ridges::build_run_setup(cfg, fs::path(config_path).parent_path());
    if (out_dir.empty()) out_dir = fs::path(config_path).stem().string() + "_out";
    ridges::RunArtifacts art = ridges::execute_run(
        setup, out_dir, force, setup.force_preset, fs::absolute(config_path).string());
    if (!art.report.complete) {
        std::cerr << "run diverged: " << art.report.error << "\n";
        return 3;
    }
    std::cout << "wrote " << art.dir.string() << " (" << art.report.snapshots.size()
              << " snapshots, t_end=" << art.report.snapshots.back().first << ")\n";
    return 0;
}

int cmd_experiment(const std::string& name, std::string out_dir, bool force,
                   const std::vector<std::string>& override_args) {
    std::vector<std::pair<std::string, std::string>> overrides;
    for (const std::string& arg : override_args) {
        auto eq = arg.find('=');
        if (eq == std::string::npos)
            throw ridges::ConfigError("override '" + arg + "' is not of the form key=value");
        overrides.emplace_back(arg.substr(0, eq), arg.substr(eq + 1));
    }
    ridges::ExperimentPlan plan = ridges::experiment_plan(name, overrides);
    if (out_dir.empty()) out_dir = name;
    ridges::run_experiment(plan, out_dir, force);
    std::cout << "wrote " << out_dir << " (" << plan.points.size() << " runs)\n";
    return 0;
}

int cmd_field(const std::string& config_path, const std::string& out_dir, bool force) {
    ridges::ConfigMap cfg = ridges::load_config(config_path);
    // accept a full run config; only the field section matters here
    ridges::RunSetup setup;
    if (!cfg.get("force.preset") && !cfg.get("force.law"))
        cfg.entries.emplace_back("force.preset", "kc_stationary");
    setup = ridges::build_run_setup(cfg, fs::path(config_path).parent_path());
    ridges::prepare_run_dir(out_dir, force);
    ridges::write_field_svg(fs::path(out_dir) / "field.svg", setup.sim.field);
    int w = 32, h = 32;
    if (!setup.angle_map_path.empty()) {
        std::ifstream in(setup.angle_map_path);
        ridges::AngleGrid grid = ridges::load_angle_map(in);
        w = grid.width;
        h = grid.height;
    }
    ridges::write_theta_grid_csv(fs::path(out_dir) / "theta_grid.csv", setup.sim.field, w, h);
    std::cout << "wrote " << out_dir << "/field.svg and theta_grid.csv\n";
    return 0;
}

int cmd_analyze(const std::string& run_dir) {
    fs::path dir(run_dir);
    ridges::ConfigMap manifest = ridges::load_config(dir / "manifest.txt");
    ridges::ConfigMap cfg;
    for (const auto& [k, v] : manifest.entries)
        if (k.rfind("config.", 0) == 0) cfg.entries.emplace_back(k.substr(7), v);
    ridges::RunSetup setup = ridges::build_run_setup(cfg, dir);

    std::vector<fs::path> snapshots;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const fs::path& p = entry.path();
        if (p.extension() == ".csv" && p.filename().string().rfind("snapshot_", 0) == 0)
            snapshots.push_back(p);
    }
    if (snapshots.empty()) throw ridges::IoError("no snapshot CSVs in " + dir.string());
    std::sort(snapshots.begin(), snapshots.end());
    auto [t, state] = ridges::read_snapshot_csv(snapshots.back());
    auto tau_series = ridges::read_tau_csv(dir / "tau.csv");

    auto summary = ridges::analysis_summary(setup, state, tau_series);
    double residual = ridges::static_residual(state, setup.sim.force, setup.sim.field);
    summary.emplace_back("static_residual", ridges::detail::fmt_g(residual));
    ridges::write_key_values(dir / "analysis.txt", summary);

    auto out = ridges::detail::open_out(dir / "analysis.csv");
    out << "run,key,value\n";
    for (const auto& [k, v] : summary) out << dir.filename().string() << ',' << k << ',' << v << '\n';
    for (const auto& [k, v] : summary) std::cout << k << " = " << v << '\n';
    return 0;
}

int cmd_coeffs(const std::string& preset_name, const std::string& out_path, double eta,
               double cutoff) {
    ridges::ForceModel model = ridges::preset(preset_name);
    model.eta = eta;
    if (cutoff > 0.0) model.cutoff = cutoff;
    ridges::validate(model);
    ridges::write_coefficient_csv(out_path, model);
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"anisotropic particle simulation of stationary ridge patterns"};
    app.require_subcommand(1);

    std::string config_path, out_dir, run_dir, experiment_name, preset_name, coeff_out;
    std::vector<std::string> overrides;
    bool force = false;
    double eta = 1.0, cutoff = 0.0;

    CLI::App* simulate = app.add_subcommand("simulate", "run one configured simulation");
    simulate->add_option("--config", config_path, "config file")->required();
    simulate->add_option("--out", out_dir, "output directory");
    simulate->add_flag("--force", force, "overwrite an existing output directory");

    CLI::App* experiment = app.add_subcommand("experiment", "run a named experiment preset");
    experiment->add_option("name", experiment_name, "experiment name")->required();
    experiment->add_option("--out", out_dir, "output directory");
    experiment->add_flag("--force", force, "overwrite an existing output directory");
    experiment->add_option("overrides", overrides, "key=value config overrides");

    CLI::App* field = app.add_subcommand("field", "render an orientation field");
    field->add_option("--config", config_path, "config file with a field section")->required();
    field->add_option("--out", out_dir, "output directory")->required();
    field->add_flag("--force", force, "overwrite an existing output directory");

    CLI::App* analyze = app.add_subcommand("analyze", "recompute analysis from run artifacts");
    analyze->add_option("--run", run_dir, "run directory")->required();

    CLI::App* coeffs = app.add_subcommand("coeffs", "dump force coefficient curves as CSV");
    coeffs->add_option("preset", preset_name, "force preset name")->required();
    coeffs->add_option("--out", coeff_out, "output CSV path")->required();
    coeffs->add_option("--eta", eta, "argument rescaling factor");
    coeffs->add_option("--cutoff", cutoff, "override cutoff");

    try {
        app.parse(argc, argv);
        if (simulate->parsed()) return cmd_simulate(config_path, out_dir, force);
        if (experiment->parsed()) return cmd_experiment(experiment_name, out_dir, force, overrides);
        if (field->parsed()) return cmd_field(config_path, out_dir, force);
        if (analyze->parsed()) return cmd_analyze(run_dir);
        if (coeffs->parsed()) return cmd_coeffs(preset_name, coeff_out, eta, cutoff);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const ridges::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ridges::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const ridges::DivergenceError& e) {
        std::cerr << "diverged: " << e.what() << "\n";
        return 3;
    } catch (const ridges::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
