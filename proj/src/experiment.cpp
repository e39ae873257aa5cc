#include "mfpid/experiment.hpp"

#include "mfpid/lqg.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <iomanip>
#include <limits>
#include <mutex>
#include <ostream>

namespace mfpid {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::ofstream open_out(const fs::path& p) {
    std::ofstream os(p);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    os << std::setprecision(10);
    return os;
}

std::vector<GuidanceMode> parse_modes(const std::vector<std::string>& names) {
    std::vector<GuidanceMode> out;
    for (const auto& n : names) out.push_back(parse_mode(n));
    return out;
}

std::vector<double> snapshot_grid() {
    std::vector<double> t;
    for (int i = 1; i < 20; ++i) t.push_back(0.05 * i);
    return t;
}

json report_json(const EnergyReport& r) {
    json j;
    j["mode"] = to_string(r.mode);
    j["total"] = r.total;
    j["total_stderr"] = r.total_stderr;
    j["attribution"] = r.attribution_initial ? "initial-label" : "terminal-posterior";
    j["energy_by_initial"] = r.energy_initial;
    j["stderr_by_initial"] = r.stderr_initial;
    j["fraction_by_initial"] = r.fraction_initial;
    j["energy_by_terminal"] = r.energy_terminal;
    j["stderr_by_terminal"] = r.stderr_terminal;
    j["fraction_by_terminal"] = r.fraction_terminal;
    j["zone_energy"] = std::vector<double>(r.zone_energy.data(), r.zone_energy.data() + r.zone_energy.size());
    j["wall_seconds"] = r.wall_seconds;
    return j;
}

void write_point(const PointResult& pr, const fs::path& dir) {
    fs::create_directories(dir);
    const auto& runs = pr.runs;
    const int d = pr.cfg.dimension;

    {
        auto os = open_out(dir / "energy.csv");
        os << "t";
        for (const auto& r : runs) os << ",P_" << to_string(r.mode) << ",E_" << to_string(r.mode);
        os << '\n';
        const std::size_t N = runs.front().report.power.size();
        for (std::size_t n = 0; n <= N; ++n) {
            os << runs.front().report.time[n];
            for (const auto& r : runs)
                os << ',' << r.report.power[std::min(n, N - 1)] << ',' << r.report.cumulative[n];
            os << '\n';
        }
    }
    {
        auto os = open_out(dir / "terminal.csv");
        os << "mode,basin,count,coord,mean,std\n";
        for (const auto& r : runs)
            for (std::size_t k = 0; k < r.report.terminal.size(); ++k) {
                const auto& ts = r.report.terminal[k];
                for (Eigen::Index j = 0; j < ts.mean.size(); ++j)
                    os << to_string(r.mode) << ',' << k << ',' << ts.count << ',' << j << ',' << ts.mean[j] << ','
                       << ts.std[j] << '\n';
            }
    }
    {
        // every 10th grid point
        auto os = open_out(dir / "trajectories.csv");
        os << "mode,particle,t";
        for (int j = 0; j < d; ++j) os << ",x" << j;
        os << '\n';
        for (const auto& r : runs)
            for (std::size_t p = 0; p < r.report.paths.size(); ++p) {
                const Mat& path = r.report.paths[p];
                for (Eigen::Index n = 0; n < path.cols(); ++n) {
                    if (n % 10 != 0 && n + 1 != path.cols()) continue;
                    os << to_string(r.mode) << ',' << r.report.path_ids[p] << ','
                       << r.report.time[static_cast<std::size_t>(n)];
                    for (int j = 0; j < d; ++j) os << ',' << path(j, n);
                    os << '\n';
                }
            }
    }
    {
        auto os = open_out(dir / "zones.csv");
        os << "mode,zone,energy\n";
        for (const auto& r : runs)
            for (int j = 0; j < d; ++j) os << to_string(r.mode) << ',' << j << ',' << r.report.zone_energy[j] << '\n';
    }
    {
        // zone x time ensemble mean, every 25th grid point
        auto os = open_out(dir / "zone_mean.csv");
        os << "mode,t";
        for (int j = 0; j < d; ++j) os << ",zone" << j;
        os << '\n';
        for (const auto& r : runs) {
            const Mat& m = r.report.mean_trace;
            for (Eigen::Index n = 0; n < m.cols(); ++n) {
                if (n % 25 != 0 && n + 1 != m.cols()) continue;
                os << to_string(r.mode) << ',' << r.report.time[static_cast<std::size_t>(n)];
                for (int j = 0; j < d; ++j) os << ',' << m(j, n);
                os << '\n';
            }
        }
    }
    {
        auto os = open_out(dir / "affine_fit.csv");
        os << "mode,t,S,s,R2\n";
        const auto times = snapshot_grid();
        for (const auto& r : runs) {
            if (r.mode == GuidanceMode::ClosedLoop) continue;
            SimConfig sc = sim_config(pr.cfg, r.mode);
            const ScoreContext ctx(sc.schedule, guidance_centres(sc), sc.target, sc.initial);
            for (std::size_t i = 0; i < times.size() && i < r.report.snapshots.size(); ++i) {
                const auto f = affine_fit(ctx, times[i], r.report.snapshots[i], r.report.starts);
                os << to_string(r.mode) << ',' << f.t << ',' << f.S << ',' << f.s << ',' << f.r2 << '\n';
            }
        }
    }

    const json cfg_echo = to_json(pr.cfg);
    for (const auto& r : runs) {
        json j = report_json(r.report);
        j["name"] = pr.cfg.name;
        j["seed"] = pr.cfg.seed;
        if (!std::isnan(pr.value)) j["sweep_value"] = pr.value;
        j["saving_percent"] = pr.saving_percent();
        j["config"] = cfg_echo;
        if (pr.cfg.dimension > 1)
            j["note"] = "per-zone covariances use the Scenario-B sigma values broadcast across zones";
        auto os = open_out(dir / ("summary_" + to_string(r.mode) + ".json"));
        os << j.dump(2) << '\n';
    }
}

PointResult run_point(const ExperimentConfig& c, double value, std::ostream* log, std::mutex& log_mutex) {
    PointResult pr;
    pr.cfg = c;
    pr.value = value;
    const auto t0 = std::chrono::steady_clock::now();
    for (GuidanceMode m : parse_modes(c.modes)) {
        SimConfig sc = sim_config(c, m);
        sc.snapshot_times = snapshot_grid();
        pr.runs.push_back({m, run_bridge(sc)});
        if (log) {
            std::lock_guard lk(log_mutex);
            *log << c.name << " " << to_string(m) << ": E = " << pr.runs.back().report.total << " +- "
                 << pr.runs.back().report.total_stderr << " (" << pr.runs.back().report.wall_seconds << " s)\n";
        }
    }
    pr.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return pr;
}

} // namespace

const ModeRun* PointResult::find(GuidanceMode m) const {
    for (const auto& r : runs)
        if (r.mode == m) return &r;
    return nullptr;
}

double PointResult::saving_percent() const {
    const ModeRun* mf = find(GuidanceMode::MfLinear);
    if (!mf) mf = find(GuidanceMode::ClosedLoop);
    const ModeRun* ia = find(GuidanceMode::IaZero);
    if (!ia) ia = find(GuidanceMode::IaTargetMean);
    if (!mf || !ia) return kNaN;
    return 100.0 * (1.0 - mf->report.total / ia->report.total);
}

double PointResult::per_zone(GuidanceMode m) const {
    const ModeRun* r = find(m);
    return r ? r->report.total / cfg.dimension : kNaN;
}

std::vector<PointResult> run_experiment(const ExperimentConfig& cfg, const fs::path& out, std::ostream* log) {
    if (auto errs = validate_config(cfg); !errs.empty()) {
        std::string msg;
        for (const auto& e : errs) msg += (msg.empty() ? "" : "\n") + e;
        throw ValidationError(msg);
    }
    std::vector<std::pair<ExperimentConfig, double>> points;
    if (cfg.sweep_axis == "none") points.emplace_back(cfg, kNaN);
    else
        for (double v : cfg.sweep_values) points.emplace_back(at_sweep_point(cfg, v), v);

    std::mutex log_mutex;
    std::vector<PointResult> results;
    if (cfg.parallel && points.size() > 1) {
        std::vector<std::future<PointResult>> fut;
        for (const auto& [c, v] : points)
            fut.push_back(std::async(std::launch::async, [&, c = c, v = v] { return run_point(c, v, log, log_mutex); }));
        for (auto& f : fut) results.push_back(f.get());
    } else {
        for (const auto& [c, v] : points) results.push_back(run_point(c, v, log, log_mutex));
    }

    if (!out.empty()) {
        fs::create_directories(out);
        for (const auto& pr : results) write_point(pr, points.size() == 1 ? out : out / pr.cfg.name);
        if (points.size() > 1 || cfg.sweep_axis != "none") {
            auto os = open_out(out / "sweep.csv");
            os << (cfg.sweep_axis == "dimension" ? "d" : cfg.sweep_axis == "components" ? "K" : "rho");
            const auto modes = parse_modes(cfg.modes);
            for (auto m : modes) os << ",E_per_zone_" << to_string(m);
            os << ",saving_percent,wall_seconds\n";
            for (const auto& pr : results) {
                os << pr.value;
                for (auto m : modes) os << ',' << pr.per_zone(m);
                os << ',' << pr.saving_percent() << ',' << pr.wall_seconds << '\n';
            }
        }
        json top;
        top["config"] = to_json(cfg);
        for (const auto& pr : results) {
            json p;
            p["name"] = pr.cfg.name;
            if (!std::isnan(pr.value)) p["value"] = pr.value;
            p["saving_percent"] = pr.saving_percent();
            p["wall_seconds"] = pr.wall_seconds;
            for (const auto& r : pr.runs) p["totals"][to_string(r.mode)] = {r.report.total, r.report.total_stderr};
            top["points"].push_back(p);
        }
        auto os = open_out(out / "summary.json");
        os << top.dump(2) << '\n';
    }
    return results;
}

// ---------------------------------------------------------------------------

AffineFit affine_fit(const ScoreContext& ctx, double t, const Mat& x, const Mat& z) {
    const auto s = ctx.slice(t);
    const int d = ctx.dim();
    ScoreContext::Workspace ws;
    ws.resize(d, ctx.target().size());
    Vec u(d);
    // accumulate sums over (particle, coordinate) pairs; equal weights
    double n = 0, sx = 0, su = 0, sxx = 0, sxu = 0, suu = 0;
    for (Eigen::Index i = 0; i < x.cols(); ++i) {
        ctx.drift(s, x.col(i), z.col(i), nullptr, ws, u);
        for (int j = 0; j < d; ++j) {
            const double xv = x(j, i), uv = u[j];
            n += 1;
            sx += xv;
            su += uv;
            sxx += xv * xv;
            sxu += xv * uv;
            suu += uv * uv;
        }
    }
    const double vx = sxx / n - (sx / n) * (sx / n);
    const double vu = suu / n - (su / n) * (su / n);
    const double cxu = sxu / n - (sx / n) * (su / n);
    AffineFit f;
    f.t = t;
    const double slope = vx > 0 ? cxu / vx : 0.0;
    f.S = -slope;
    f.s = -(su / n - slope * sx / n);
    f.r2 = vu > 0 && vx > 0 ? cxu * cxu / (vx * vu) : 1.0;
    return f;
}

void write_lqg_csv(const ExperimentConfig& cfg, std::ostream& os, int n_points) {
    const LqgSolution sol = solve_lqg({cfg.kappa, cfg.q, cfg.lqg_m_tar, cfg.lqg_sigma_tar});
    const IaTrajectory ia0 = ia_baseline(sol, 0.0);
    const IaTrajectory iam = ia_baseline(sol, cfg.lqg_m_tar);
    const auto mf = lqg_metrics(sol, n_points);
    const auto m0 = lqg_metrics(ia0, n_points);
    const auto mm = lqg_metrics(iam, n_points);
    os << std::setprecision(12);
    os << "t,S,Sigma,m_mf,s_mf,s_ia0,s_iam,P_mf,P_ia0,P_iam,E_mf,E_ia0,E_iam\n";
    for (std::size_t i = 0; i < mf.t.size(); ++i) {
        const double t = mf.t[i];
        os << t << ',' << sol.S(t) << ',' << sol.Sigma(t) << ',' << sol.m(t) << ',' << sol.s(t) << ',' << ia0.s(t)
           << ',' << iam.s(t) << ',' << mf.P[i] << ',' << m0.P[i] << ',' << mm.P[i] << ',' << mf.E[i] << ','
           << m0.E[i] << ',' << mm.E[i] << '\n';
    }
}

void write_lqg_mbar_csv(const ExperimentConfig& cfg, std::ostream& os) {
    const LqgSolution sol = solve_lqg({cfg.kappa, cfg.q, cfg.lqg_m_tar, cfg.lqg_sigma_tar});
    const double e_mf = lqg_metrics(sol).E.back();
    os << std::setprecision(12) << "m_bar,E_ia,E_mf,saving_percent\n";
    for (double mb : cfg.m_bar_grid) {
        const double e = lqg_metrics(ia_baseline(sol, mb)).E.back();
        os << mb << ',' << e << ',' << e_mf << ',' << 100.0 * (1.0 - e_mf / e) << '\n';
    }
}

void write_density_csv(const ExperimentConfig& cfg, const std::vector<std::string>& modes,
                       const std::vector<double>& times, std::ostream& os, int n_grid) {
    if (cfg.dimension != 1) throw ValidationError("density: only d = 1 is supported");
    if (n_grid < 2) throw ValidationError("density: grid needs at least 2 points");
    const Endpoints ep = build_endpoints(cfg);
    double lo = 0.0, hi = 0.0;
    auto widen = [&](const GaussianMixture& g) {
        for (std::size_t k = 0; k < g.size(); ++k) {
            const double sd = std::sqrt(g.cov(k).matrix()(0, 0));
            lo = std::min(lo, g.mean(k)[0] - 5 * sd);
            hi = std::max(hi, g.mean(k)[0] + 5 * sd);
        }
    };
    widen(ep.target);
    if (ep.initial) widen(*ep.initial);
    const double dt = 1.0 / cfg.steps;
    os << std::setprecision(10) << "method,t,x,density\n";
    for (const auto& name : modes) {
        const GuidanceMode m = parse_mode(name);
        if (m == GuidanceMode::ClosedLoop) throw ValidationError("density: closed-loop has no analytic marginal");
        SimConfig sc = sim_config(cfg, m);
        const ScoreContext ctx(sc.schedule, guidance_centres(sc), sc.target, sc.initial);
        for (double t : times) {
            if (!(t >= 0.0 && t <= 1.0)) throw ValidationError("density: time outside [0,1]");
            std::optional<DenseMixture> law;
            if (t > dt / 2 && t < 1.0 - dt / 2) law = ctx.marginal(ctx.slice(t));
            for (int i = 0; i < n_grid; ++i) {
                Vec x(1);
                x[0] = lo + (hi - lo) * i / (n_grid - 1);
                double p;
                if (law) p = law->pdf(x);
                else if (t >= 0.5) p = ep.target.pdf(x);
                else if (ep.initial) p = ep.initial->pdf(x);
                else p = kNaN;  // delta start
                os << name << ',' << t << ',' << x[0] << ',' << p << '\n';
            }
        }
    }
}

FixedPointResult write_guidance_check_csv(const ExperimentConfig& cfg, std::ostream& os) {
    const SimConfig sc = sim_config(cfg, GuidanceMode::MfLinear);
    const Mat linear = guidance_centres(sc);
    FixedPointResult fp = run_fixed_point(sc, cfg.fp_tol, cfg.fp_max_iter);
    os << std::setprecision(10) << "iteration,max_update";
    for (Eigen::Index i = 0; i < linear.rows(); ++i) os << ",residual_" << i;
    os << '\n';
    for (std::size_t it = 0; it < fp.iterates.size(); ++it) {
        os << it + 1 << ',' << fp.max_update[it];
        const Mat diff = fp.iterates[it] - linear;
        for (Eigen::Index i = 0; i < diff.rows(); ++i) os << ',' << diff.row(i).cwiseAbs().maxCoeff();
        os << '\n';
    }
    return fp;
}

} // namespace mfpid
