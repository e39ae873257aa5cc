#include "mfpid/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <barrier>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace mfpid {

namespace {
constexpr std::size_t kChunk = 256;
constexpr std::size_t kMaxPaths = 50;
} // namespace

std::string to_string(GuidanceMode m) {
    switch (m) {
    case GuidanceMode::MfLinear: return "mf";
    case GuidanceMode::IaZero: return "ia0";
    case GuidanceMode::IaTargetMean: return "iam";
    case GuidanceMode::Fixed: return "fixed";
    case GuidanceMode::ClosedLoop: return "closed-loop";
    case GuidanceMode::Piecewise: return "piecewise";
    }
    return "?";
}

GuidanceMode parse_mode(const std::string& s) {
    if (s == "mf" || s == "mf-linear") return GuidanceMode::MfLinear;
    if (s == "ia0" || s == "ia-zero") return GuidanceMode::IaZero;
    if (s == "iam" || s == "ia-target-mean") return GuidanceMode::IaTargetMean;
    if (s == "fixed") return GuidanceMode::Fixed;
    if (s == "closed-loop" || s == "cl") return GuidanceMode::ClosedLoop;
    if (s == "piecewise") return GuidanceMode::Piecewise;
    throw ValidationError("unknown guidance mode '" + s + "' (expected mf, ia0, iam, fixed, closed-loop)");
}

void validate(const SimConfig& cfg) {
    if (cfg.batch < 1) throw ValidationError("sim: batch must be at least 1");
    if (cfg.n_steps < 10) throw ValidationError("sim: n_steps must be at least 10");
    if (cfg.workers < 1) throw ValidationError("sim: workers must be at least 1");
    if (cfg.initial && cfg.initial->dim() != cfg.dim())
        throw ValidationError("sim: initial and target dimensions differ");
    if (cfg.mode == GuidanceMode::Fixed && cfg.fixed_centre.size() != cfg.dim())
        throw ValidationError("sim: fixed guidance centre has the wrong dimension");
    if (cfg.mode == GuidanceMode::Piecewise &&
        (cfg.centres.cols() != cfg.dim() ||
         static_cast<std::size_t>(cfg.centres.rows()) != cfg.schedule.intervals()))
        throw ValidationError("sim: piecewise centres need one row per interval and d columns");
    for (double t : cfg.snapshot_times)
        if (!(t >= 0.0 && t <= 1.0)) throw ValidationError("sim: snapshot time outside [0,1]");
}

Mat guidance_centres(const SimConfig& cfg) {
    const int d = cfg.dim();
    const Vec m_tar = cfg.target.mean();
    const Vec m_in = cfg.initial ? cfg.initial->mean() : Vec::Zero(d);
    switch (cfg.mode) {
    case GuidanceMode::MfLinear:
    case GuidanceMode::ClosedLoop:
        return linear_guidance(m_in, m_tar).centres(cfg.schedule);
    case GuidanceMode::IaZero:
        return GuidanceTrajectory::constant(Vec::Zero(d)).centres(cfg.schedule);
    case GuidanceMode::IaTargetMean:
        return GuidanceTrajectory::constant(m_tar).centres(cfg.schedule);
    case GuidanceMode::Fixed:
        return GuidanceTrajectory::constant(cfg.fixed_centre).centres(cfg.schedule);
    case GuidanceMode::Piecewise:
        return cfg.centres;
    }
    return {};
}

EnsembleState sample_initial(const SimConfig& cfg) {
    validate(cfg);
    const int d = cfg.dim();
    const auto B = static_cast<Eigen::Index>(cfg.batch);
    EnsembleState st;
    st.x = Mat::Zero(d, B);
    st.labels.assign(cfg.batch, 0);
    st.energy.assign(cfg.batch, 0.0);
    st.zone_energy = Mat::Zero(d, B);
    st.rng.reserve(cfg.batch);
    for (std::size_t i = 0; i < cfg.batch; ++i) st.rng.emplace_back(cfg.seed, i);

    if (cfg.initial) {
        const GaussianMixture& p = *cfg.initial;
        Vec xi(d);
        for (std::size_t i = 0; i < cfg.batch; ++i) {
            CounterRng& g = st.rng[i];
            const double u = g.uniform();
            std::size_t j = 0;
            double acc = p.weight(0);
            while (j + 1 < p.size() && u >= acc) acc += p.weight(++j);
            for (int c = 0; c < d; ++c) xi[c] = g.normal();
            st.labels[i] = static_cast<int>(j);
            st.x.col(static_cast<Eigen::Index>(i)) = p.mean(j) + p.cov(j).transform(xi);
        }
    }
    st.z = st.x;
    return st;
}

double eval_time(int n, int n_steps, bool midpoint) {
    const double dt = 1.0 / n_steps;
    const double t = (n + (midpoint ? 0.5 : 0.0)) * dt;
    return std::clamp(t, 0.5 * dt, 1.0 - 0.5 * dt);
}

namespace {

// Advance particles [lo, hi); writes |u|^2 per particle into usq.
void advance(EnsembleState& st, const ScoreContext& ctx, const ScoreContext::Slice& slice, const Vec* nu_hat,
             double dt, std::size_t lo, std::size_t hi, ScoreContext::Workspace& ws, Vec& u,
             std::vector<double>& usq) {
    const double sq = std::sqrt(dt);
    const int d = static_cast<int>(st.x.rows());
    for (std::size_t i = lo; i < hi; ++i) {
        const auto c = static_cast<Eigen::Index>(i);
        ctx.drift(slice, st.x.col(c), st.z.col(c), nu_hat, ws, u);
        const double u2 = u.squaredNorm();
        usq[i] = u2;
        st.energy[i] += u2 * dt;
        st.zone_energy.col(c) += u.cwiseAbs2() * dt;
        CounterRng& g = st.rng[i];
        for (int k = 0; k < d; ++k) st.x(k, c) += u[k] * dt + sq * g.normal();
        if (!st.x.col(c).allFinite()) {
            std::ostringstream os;
            os << "non-finite position for particle " << i << " at t = " << slice.t;
            throw NumericalError(os.str());
        }
    }
}

Vec column_mean(const Mat& x) { return x.rowwise().mean(); }

Vec column_std(const Mat& x, const Vec& mean) {
    if (x.cols() < 2) return Vec::Zero(x.rows());
    return ((x.colwise() - mean).array().square().rowwise().sum() / static_cast<double>(x.cols() - 1)).sqrt();
}

void group_stats(const std::vector<double>& e, const std::vector<int>& labels, std::size_t groups,
                 std::vector<double>& mean, std::vector<double>& err, std::vector<double>& frac) {
    std::vector<double> s(groups, 0.0), s2(groups, 0.0);
    std::vector<std::size_t> n(groups, 0);
    for (std::size_t i = 0; i < e.size(); ++i) {
        const auto k = static_cast<std::size_t>(labels[i]);
        s[k] += e[i];
        s2[k] += e[i] * e[i];
        ++n[k];
    }
    mean.assign(groups, std::nan(""));
    err.assign(groups, std::nan(""));
    frac.assign(groups, 0.0);
    for (std::size_t k = 0; k < groups; ++k) {
        frac[k] = static_cast<double>(n[k]) / static_cast<double>(e.size());
        if (n[k] == 0) continue;
        mean[k] = s[k] / static_cast<double>(n[k]);
        if (n[k] > 1) {
            const double var = (s2[k] - s[k] * mean[k]) / static_cast<double>(n[k] - 1);
            err[k] = std::sqrt(std::max(var, 0.0) / static_cast<double>(n[k]));
        }
    }
}

} // namespace

void step(EnsembleState& st, const ScoreContext& ctx, const SimConfig& cfg) {
    const double dt = 1.0 / cfg.n_steps;
    const auto slice = ctx.slice(eval_time(st.step, cfg.n_steps, cfg.midpoint));
    Vec nu_hat;
    if (cfg.mode == GuidanceMode::ClosedLoop) nu_hat = column_mean(st.x);
    ScoreContext::Workspace ws;
    ws.resize(cfg.dim(), cfg.target.size());
    Vec u(cfg.dim());
    std::vector<double> usq(cfg.batch);
    advance(st, ctx, slice, nu_hat.size() ? &nu_hat : nullptr, dt, 0, cfg.batch, ws, u, usq);
    ++st.step;
}

// ===========================================================================
// Full bridge
// ===========================================================================

EnergyReport run_bridge(const SimConfig& cfg) {
    const auto wall0 = std::chrono::steady_clock::now();
    validate(cfg);
    const ScoreContext ctx(cfg.schedule, guidance_centres(cfg), cfg.target, cfg.initial);
    EnsembleState st = sample_initial(cfg);

    const int N = cfg.n_steps, d = cfg.dim();
    const double dt = 1.0 / N;
    const std::size_t B = cfg.batch;
    const bool closed = cfg.mode == GuidanceMode::ClosedLoop;

    EnergyReport rep;
    rep.mode = cfg.mode;
    rep.attribution_initial = cfg.initial.has_value();
    rep.time.resize(static_cast<std::size_t>(N) + 1);
    for (int n = 0; n <= N; ++n) rep.time[static_cast<std::size_t>(n)] = n == N ? 1.0 : n * dt;
    rep.power.assign(static_cast<std::size_t>(N), 0.0);
    rep.cumulative.assign(static_cast<std::size_t>(N) + 1, 0.0);
    rep.mean_trace.resize(d, N + 1);
    rep.std_trace.resize(d, N + 1);
    rep.starts = st.z;

    const std::size_t npaths = std::min({cfg.trajectory_paths, kMaxPaths, B});
    for (std::size_t p = 0; p < npaths; ++p) {
        rep.path_ids.push_back(p * B / npaths);
        rep.paths.emplace_back(d, N + 1);
    }
    std::vector<int> snap_steps;
    for (double t : cfg.snapshot_times) snap_steps.push_back(static_cast<int>(std::lround(t * N)));
    rep.snapshots.assign(snap_steps.size(), Mat());

    auto record = [&](int n) {
        const Vec m = column_mean(st.x);
        rep.mean_trace.col(n) = m;
        rep.std_trace.col(n) = column_std(st.x, m);
        for (std::size_t p = 0; p < npaths; ++p)
            rep.paths[p].col(n) = st.x.col(static_cast<Eigen::Index>(rep.path_ids[p]));
        for (std::size_t s = 0; s < snap_steps.size(); ++s)
            if (snap_steps[s] == n) rep.snapshots[s] = st.x;
    };
    record(0);

    std::vector<double> usq(B, 0.0);
    ScoreContext::Slice slice;
    Vec nu_hat;
    auto prepare = [&](int n) {
        slice = ctx.slice(eval_time(n, N, cfg.midpoint));
        if (closed) nu_hat = column_mean(st.x);
    };
    auto finish = [&](int n) {
        double acc = 0.0;
        for (double v : usq) acc += v;
        rep.power[static_cast<std::size_t>(n)] = acc / static_cast<double>(B);
        rep.cumulative[static_cast<std::size_t>(n) + 1] =
            rep.cumulative[static_cast<std::size_t>(n)] + rep.power[static_cast<std::size_t>(n)] * dt;
        record(n + 1);
    };

    const std::size_t nchunks = (B + kChunk - 1) / kChunk;
    const auto W = static_cast<std::size_t>(std::clamp<std::size_t>(static_cast<std::size_t>(cfg.workers), 1, nchunks));
    std::vector<ScoreContext::Workspace> ws(W);
    std::vector<Vec> ubuf(W, Vec(d));
    for (auto& w : ws) w.resize(d, cfg.target.size());

    auto work = [&](std::size_t w) {
        const Vec* nh = closed ? &nu_hat : nullptr;
        for (std::size_t c = w; c < nchunks; c += W)
            advance(st, ctx, slice, nh, dt, c * kChunk, std::min(B, (c + 1) * kChunk), ws[w], ubuf[w], usq);
    };

    prepare(0);
    if (W == 1) {
        for (int n = 0; n < N; ++n) {
            work(0);
            finish(n);
            if (n + 1 < N) prepare(n + 1);
        }
    } else {
        int n = 0;
        bool stop = false;
        std::atomic<bool> failed{false};
        std::exception_ptr err;
        std::mutex err_mu;
        auto on_phase = [&]() noexcept {
            if (failed.load()) {
                stop = true;
                return;
            }
            try {
                finish(n);
                ++n;
                if (n < N) prepare(n);
                else stop = true;
            } catch (...) {
                std::lock_guard lock(err_mu);
                err = std::current_exception();
                stop = true;
            }
        };
        std::barrier sync(static_cast<std::ptrdiff_t>(W), on_phase);
        {
            std::vector<std::jthread> pool;
            for (std::size_t w = 0; w < W; ++w)
                pool.emplace_back([&, w] {
                    while (!stop) {
                        try {
                            if (!failed.load()) work(w);
                        } catch (...) {
                            std::lock_guard lock(err_mu);
                            if (!err) err = std::current_exception();
                            failed = true;
                        }
                        sync.arrive_and_wait();
                    }
                });
        }
        if (err) std::rethrow_exception(err);
    }

    // ---- summaries -------------------------------------------------------
    rep.particle_energy = st.energy;
    rep.final_positions = st.x;
    rep.zone_energy = st.zone_energy.rowwise().sum() / static_cast<double>(B);
    double s = 0.0, s2 = 0.0;
    for (double e : st.energy) {
        s += e;
        s2 += e * e;
    }
    rep.total = s / static_cast<double>(B);
    rep.total_stderr = B > 1 ? std::sqrt(std::max(0.0, (s2 - s * rep.total) / static_cast<double>(B - 1)) /
                                         static_cast<double>(B))
                             : 0.0;

    rep.initial_labels = st.labels;
    rep.terminal_labels.resize(B);
    for (std::size_t i = 0; i < B; ++i)
        rep.terminal_labels[i] = static_cast<int>(cfg.target.classify(st.x.col(static_cast<Eigen::Index>(i))));
    const std::size_t J = cfg.initial ? cfg.initial->size() : 1;
    group_stats(st.energy, rep.initial_labels, J, rep.energy_initial, rep.stderr_initial, rep.fraction_initial);
    group_stats(st.energy, rep.terminal_labels, cfg.target.size(), rep.energy_terminal, rep.stderr_terminal,
                rep.fraction_terminal);

    rep.terminal.resize(cfg.target.size());
    for (std::size_t k = 0; k < cfg.target.size(); ++k) {
        std::vector<Eigen::Index> idx;
        for (std::size_t i = 0; i < B; ++i)
            if (rep.terminal_labels[i] == static_cast<int>(k)) idx.push_back(static_cast<Eigen::Index>(i));
        TerminalStats& ts = rep.terminal[k];
        ts.count = idx.size();
        if (idx.empty()) continue;
        const Mat xs = st.x(Eigen::all, idx);
        ts.mean = column_mean(xs);
        ts.std = column_std(xs, ts.mean);
    }
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
    return rep;
}

// ===========================================================================
// Fixed point
// ===========================================================================

Mat midpoint_means(const SimConfig& cfg, const Mat& centres) {
    SimConfig c = cfg;
    c.mode = GuidanceMode::Piecewise;
    c.centres = centres;
    c.trajectory_paths = 0;
    c.snapshot_times.clear();
    const EnergyReport rep = run_bridge(c);
    const PwcSchedule& s = cfg.schedule;
    Mat out(static_cast<Eigen::Index>(s.intervals()), cfg.dim());
    const int N = cfg.n_steps;
    for (std::size_t i = 0; i < s.intervals(); ++i) {
        const double pos = s.midpoint(i) * N;
        const int j = std::min(static_cast<int>(pos), N - 1);
        const double w = pos - j;
        out.row(static_cast<Eigen::Index>(i)) =
            ((1.0 - w) * rep.mean_trace.col(j) + w * rep.mean_trace.col(j + 1)).transpose();
    }
    return out;
}

FixedPointResult run_fixed_point(const SimConfig& cfg, double tol, int max_iter) {
    return fixed_point_guidance(cfg.schedule, cfg.target.mean(),
                                [&](const Mat& centres) { return midpoint_means(cfg, centres); }, tol, max_iter);
}

} // namespace mfpid
