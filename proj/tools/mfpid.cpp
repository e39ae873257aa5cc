// mfpid: experiment driver. Verbs lqg, bridge, sweep, density, guidance-check, validate.
#include "mfpid/config.hpp"
#include "mfpid/experiment.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace mfpid;

namespace {

struct Common {
    std::string preset;
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string modes;
    bool parallel = false;
    std::optional<int> workers;
    std::optional<std::size_t> batch;
    std::optional<int> steps;
};

void add_common(CLI::App* app, Common& c, bool with_modes = true) {
    app->add_option("--preset", c.preset, "preset name");
    app->add_option("--config", c.config, "config file (key = value or JSON)");
    app->add_option("--seed", c.seed, "RNG seed");
    app->add_option("--out", c.out, "output directory");
    if (with_modes) app->add_option("--modes", c.modes, "comma separated: mf,ia0,iam,closed-loop");
    app->add_flag("--parallel", c.parallel, "run sweep points concurrently");
    app->add_option("--workers", c.workers, "worker threads per simulation");
    app->add_option("--batch", c.batch, "particles");
    app->add_option("--steps", c.steps, "time steps");
}

ExperimentConfig resolve(const Common& c, const std::string& fallback) {
    ExperimentConfig cfg = preset(c.preset.empty() ? fallback : c.preset);
    if (!c.config.empty()) cfg = load_config(c.config, cfg);
    if (c.seed) cfg.seed = *c.seed;
    if (!c.modes.empty()) {
        cfg.modes.clear();
        std::stringstream ss(c.modes);
        for (std::string m; std::getline(ss, m, ',');)
            if (!m.empty()) cfg.modes.push_back(m);
    }
    if (c.parallel) cfg.parallel = true;
    if (c.workers) cfg.workers = *c.workers;
    if (c.batch) cfg.batch = *c.batch;
    if (c.steps) cfg.steps = *c.steps;
    return cfg;
}

void check(const ExperimentConfig& cfg) {
    const auto errs = validate_config(cfg);
    if (errs.empty()) return;
    std::string msg;
    for (const auto& e : errs) msg += (msg.empty() ? "" : "\n") + e;
    throw ValidationError(msg);
}

// Writes via `fn` to out/name, or stdout without --out.
template <class F>
void emit(const std::string& out, const std::string& name, F&& fn) {
    if (out.empty()) {
        fn(std::cout);
        return;
    }
    fs::create_directories(out);
    std::ofstream os(fs::path(out) / name);
    if (!os) throw std::runtime_error("cannot write " + (fs::path(out) / name).string());
    fn(os);
    std::cerr << "wrote " << (fs::path(out) / name).string() << '\n';
}

void print_results(const std::vector<PointResult>& res) {
    for (const auto& pr : res) {
        std::cout << pr.cfg.name << ':';
        for (const auto& r : pr.runs)
            std::cout << ' ' << to_string(r.mode) << '=' << r.report.total << "(+-" << r.report.total_stderr << ')';
        std::cout << " saving=" << pr.saving_percent() << "% wall=" << pr.wall_seconds << "s\n";
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mean-field path-integral diffusion experiments"};
    app.require_subcommand(1);

    // lqg
    auto* lqg = app.add_subcommand("lqg", "scalar TCL bridge: closed-form mean-field and IA tables");
    Common lc;
    lqg->add_option("--preset", lc.preset, "preset name (default lqg-tcl)");
    lqg->add_option("--config", lc.config, "config file");
    lqg->add_option("--out", lc.out, "output directory (stdout otherwise)");
    std::optional<double> kappa, q, m_tar, sigma_tar;
    std::vector<double> m_bar_grid;
    int n_points = 4001;
    lqg->add_option("--kappa", kappa);
    lqg->add_option("--q", q);
    lqg->add_option("--m-tar", m_tar);
    lqg->add_option("--sigma-tar", sigma_tar);
    lqg->add_option("--m-bar-grid", m_bar_grid)->delimiter(',');
    lqg->add_option("--points", n_points, "time grid points")->check(CLI::Range(3, 1000001));

    auto* bridge = app.add_subcommand("bridge", "simulate one scenario under each guidance mode");
    Common bc;
    add_common(bridge, bc);

    auto* sweep = app.add_subcommand("sweep", "run a dimension / components / ar-rho sweep");
    Common sc;
    add_common(sweep, sc);
    std::vector<double> sweep_values;
    sweep->add_option("--values", sweep_values, "override sweep values")->delimiter(',');

    auto* density = app.add_subcommand("density", "gridded marginal densities per method (d = 1)");
    Common dc;
    add_common(density, dc);
    std::string scenario;
    std::vector<double> times{0.1, 0.3, 0.5, 0.7, 1.0};
    int n_grid = 401;
    density->add_option("--scenario", scenario, "A or B");
    density->add_option("--times", times)->delimiter(',');
    density->add_option("--grid", n_grid)->check(CLI::Range(2, 100000));

    auto* gcheck = app.add_subcommand("guidance-check", "Picard iteration on the mean-field guidance");
    Common gc;
    add_common(gcheck, gc, false);

    auto* val = app.add_subcommand("validate", "check a config and dry-run the coefficients");
    Common vc;
    add_common(val, vc, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (*lqg) {
            ExperimentConfig cfg = resolve(lc, "lqg-tcl");
            if (kappa) cfg.kappa = *kappa;
            if (q) cfg.q = *q;
            if (m_tar) cfg.lqg_m_tar = *m_tar;
            if (sigma_tar) cfg.lqg_sigma_tar = *sigma_tar;
            if (!m_bar_grid.empty()) cfg.m_bar_grid = m_bar_grid;
            emit(lc.out, "lqg.csv", [&](std::ostream& os) { write_lqg_csv(cfg, os, n_points); });
            if (!cfg.m_bar_grid.empty())
                emit(lc.out, "lqg_mbar.csv", [&](std::ostream& os) { write_lqg_mbar_csv(cfg, os); });
        } else if (*bridge) {
            ExperimentConfig cfg = resolve(bc, "scenario-b");
            cfg.sweep_axis = "none";
            cfg.sweep_values.clear();
            print_results(run_experiment(cfg, bc.out, &std::cerr));
        } else if (*sweep) {
            ExperimentConfig cfg = resolve(sc, "d-sweep");
            if (!sweep_values.empty()) cfg.sweep_values = sweep_values;
            if (cfg.sweep_axis == "none") throw ValidationError("sweep: config has no sweep axis");
            print_results(run_experiment(cfg, sc.out, &std::cerr));
        } else if (*density) {
            std::string fallback = "scenario-a";
            if (scenario == "B" || scenario == "b") fallback = "scenario-b";
            else if (!scenario.empty() && scenario != "A" && scenario != "a")
                throw ValidationError("density: --scenario must be A or B");
            ExperimentConfig cfg = resolve(dc, fallback);
            check(cfg);
            emit(dc.out, "density.csv", [&](std::ostream& os) { write_density_csv(cfg, cfg.modes, times, os, n_grid); });
        } else if (*gcheck) {
            ExperimentConfig cfg = resolve(gc, "scenario-b");
            check(cfg);
            FixedPointResult fp;
            emit(gc.out, "guidance_check.csv", [&](std::ostream& os) { fp = write_guidance_check_csv(cfg, os); });
            std::cerr << (fp.converged ? "converged" : "not converged") << " after " << fp.iterations
                      << " iterations\n";
            if (!fp.converged) return 2;
        } else if (*val) {
            ExperimentConfig cfg = resolve(vc, "scenario-a");
            const auto errs = validate_config(cfg);
            if (!errs.empty()) {
                for (const auto& e : errs) std::cerr << "error: " << e << '\n';
                return 1;
            }
            std::cout << "ok\n";
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
