// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include "mfpid/config.hpp"
#include "mfpid/experiment.hpp"
#include "mfpid/greens.hpp"
#include "mfpid/lqg.hpp"
#include "mfpid/score.hpp"
#include "mfpid/simulate.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace mfpid;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

Vec v1(double x) { return Vec::Constant(1, x); }

double relerr(double a, double b, double floor) { return std::abs(a - b) / std::max(std::abs(b), floor); }

// standard error of the mean of (a_i - b_i)
double paired_se(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    double s = 0, s2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d;
        s2 += d * d;
    }
    const double m = s / n;
    return std::sqrt(std::max(0.0, (s2 / n - m * m)) / (n - 1));
}

// ---- 1 ---------------------------------------------------------------------
Outcome lqg_closed_form() {
    Outcome o;
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> K(0.0, 3.0), Q(0.0, 5.0), SD(0.05, 1.5), MT(-3.0, 3.0);
    double worst = 0.0, worst_rho = 0.0, worst_sig = 0.0, worst_m = 0.0;
    int n = 0;
    while (n < 50) {
        const LqgProblem p{K(rng), Q(rng), MT(rng), SD(rng)};
        const double dl = std::sqrt(p.kappa * p.kappa + p.q);
        const double vmax = dl < 1e-8 ? 1.0 : std::tanh(dl) / dl;
        if (!(p.sigma_tar * p.sigma_tar < 0.95 * vmax)) continue;  // feasible set
        ++n;
        const LqgSolution sol(p);
        const auto ref = oracle::lqg_reference(p.kappa, p.q, p.m_tar, p.sigma_tar);
        // the shooting parameter implied by the oracle's S_1
        const double X = (ref.S1 + p.kappa) / dl;
        worst_rho = std::max(worst_rho, std::abs(sol.rho() - (X - 1.0) / (X + 1.0)));
        double scale_s = 0.0;
        for (double t = 0.0; t <= 1.0; t += 0.05) scale_s = std::max(scale_s, std::abs(ref.s(t)));
        for (double t = 0.0; t <= 1.0 + 1e-12; t += 0.05) {
            worst = std::max({worst, relerr(sol.S(t), ref.S(t), 1e-2), relerr(sol.Sigma(t), ref.Sigma(t), 1e-2),
                              relerr(sol.m(t), ref.m(t), std::max(1e-2, std::abs(p.m_tar))),
                              relerr(sol.s(t), ref.s(t), std::max(1e-2, scale_s))});
        }
        worst_sig = std::max(worst_sig, std::abs(sol.Sigma(1.0) - p.sigma_tar * p.sigma_tar));
        worst_m = std::max(worst_m, std::abs(sol.m(1.0) - p.m_tar));
    }
    o.detail << "50 problems: max rel err " << worst << ", |d rho| " << worst_rho << ", |Sigma_1 - v| " << worst_sig
             << ", |m_1 - m_tar| " << worst_m;
    o.require(worst < 1e-6 && worst_rho < 1e-6, "oracle agreement");
    o.require(worst_sig < 1e-10 && worst_m < 1e-12, "bridge constraints");
    return o;
}

// ---- 2 ---------------------------------------------------------------------
struct GreenCheck {
    double oracle = 0.0, jump = 0.0, residual = 0.0;
};

GreenCheck check_schedule(const PwcSchedule& s) {
    GreenCheck r;
    auto g = std::make_shared<const GreenCoefficients>(s);
    oracle::PwcSpec spec;
    spec.breakpoints.assign(s.breakpoints().begin(), s.breakpoints().end());
    spec.betas.assign(s.betas().begin(), s.betas().end());
    const auto M = static_cast<Eigen::Index>(s.intervals());
    Mat src(M, 1);
    for (Eigen::Index i = 0; i < M; ++i) {
        spec.nu.push_back(2.5 - 2.0 * s.midpoint(static_cast<std::size_t>(i)) + 0.3 * std::sin(3.0 * i));
        src(i, 0) = spec.nu.back();
    }
    const LinearCoefficients lin(g, src), lam(g, Mat::Ones(M, 1));
    std::vector<double> ts;
    for (int j = 1; j < 50; ++j) ts.push_back(j / 50.0 + 0.0031);
    ts.back() = 0.985;
    const auto F = oracle::rk4_forward(spec, ts);
    const auto B = oracle::rk4_backward(spec, ts);
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const auto c = g->at(ts[k]);
        const auto l = lin.at(ts[k]);
        const auto m = lam.at(ts[k]);
        const double fl = 1e-3;
        for (double e : {relerr(c.a_plus, F[k].a_plus, fl), relerr(l.theta_plus[0], F[k].theta_plus, fl),
                         relerr(m.theta_plus[0], F[k].lambda_plus, fl), relerr(c.a_minus, B[k].a, fl),
                         relerr(c.b_minus, B[k].b, fl), relerr(c.c_minus, B[k].c, fl),
                         relerr(l.theta_x[0], B[k].theta_x, fl), relerr(l.theta_y[0], B[k].theta_y, fl),
                         relerr(m.theta_x[0], B[k].lambda_x, fl), relerr(m.theta_y[0], B[k].lambda_y, fl)})
            r.oracle = std::max(r.oracle, e);
    }
    for (std::size_t i = 0; i + 1 < s.intervals(); ++i) {
        const double t = s.end(i);
        const auto a = g->on_interval(i, t), b = g->on_interval(i + 1, t);
        const auto la = lin.on_interval(i, t), lb = lin.on_interval(i + 1, t);
        for (double e : {relerr(a.a_plus, b.a_plus, 1.0), relerr(a.a_minus, b.a_minus, 1.0),
                         relerr(a.b_minus, b.b_minus, 1.0), relerr(a.c_minus, b.c_minus, 1.0),
                         relerr(la.theta_plus[0], lb.theta_plus[0], 1.0), relerr(la.theta_x[0], lb.theta_x[0], 1.0),
                         relerr(la.theta_y[0], lb.theta_y[0], 1.0)})
            r.jump = std::max(r.jump, e);
    }
    const double h = 1e-6;
    for (std::size_t i = 0; i < s.intervals(); ++i)
        for (double u : {0.25, 0.5, 0.75}) {
            const double t = s.start(i) + u * (s.end(i) - s.start(i));
            if (t < 0.05 || t > 0.95) continue;
            const double beta = s.beta(i);
            const auto c = g->on_interval(i, t), p = g->on_interval(i, t + h), m = g->on_interval(i, t - h);
            r.residual = std::max({r.residual,
                                   std::abs(-(p.a_plus - m.a_plus) / (2 * h) + beta - c.a_plus * c.a_plus),
                                   std::abs((p.a_minus - m.a_minus) / (2 * h) + beta - c.a_minus * c.a_minus)});
        }
    return r;
}

Outcome green_coefficients() {
    Outcome o;
    GreenCheck worst = check_schedule(geometric_schedule(12.0, 0.65, 8));
    o.detail << "paper schedule: oracle " << worst.oracle;
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> b0(0.5, 20.0), gm(0.3, 1.0);
    const int Ms[] = {1, 2, 4, 8};
    for (int r = 0; r < 20; ++r) {
        const auto c = check_schedule(geometric_schedule(b0(rng), gm(rng), Ms[r % 4]));
        worst.oracle = std::max(worst.oracle, c.oracle);
        worst.jump = std::max(worst.jump, c.jump);
        worst.residual = std::max(worst.residual, c.residual);
    }
    o.detail << "; all 21: oracle " << worst.oracle << ", jump " << worst.jump << ", Riccati residual "
             << worst.residual;
    o.require(worst.oracle < 1e-4, "oracle");
    o.require(worst.jump < 1e-9, "continuity");
    o.require(worst.residual < 1e-5, "residual");
    return o;
}

// ---- 3 ---------------------------------------------------------------------
GaussianMixture target_1d() {
    return GaussianMixture({0.6, 0.4}, {v1(0.0), v1(1.5)}, {Covariance::isotropic(1, 0.2), Covariance::isotropic(1, 0.3)});
}

Outcome score_master() {
    Outcome o;
    const oracle::Mixture1d tar{{0.6, 0.4}, {0.0, 1.5}, {0.2, 0.3}};
    const auto sched = geometric_schedule(12.0, 0.65, 8);
    double worst = 0.0, worst_cv = 0.0;
    for (const char* name : {"scenario-a", "scenario-b"}) {
        const Endpoints ep = build_endpoints(preset(name));
        const ScoreContext ctx(sched, linear_guidance(ep.initial->mean(), ep.target.mean()), ep.target, ep.initial);
        const ScoreContext dctx(sched, linear_guidance(v1(0.0), ep.target.mean()), ep.target);
        std::mt19937_64 rng(name[9]);
        std::uniform_real_distribution<double> T(0.01, 0.99), X(-1.5, 4.0), U(0.0, 1.0);
        std::normal_distribution<double> N01;
        const auto c0 = ctx.scalars().at(0.0);
        const auto l0 = ctx.linear().at(0.0);
        for (int i = 0; i < 200; ++i) {
            const double t = T(rng), x = X(rng);
            // start drawn from the initial law
            const std::size_t j = U(rng) < 0.6 ? 0 : 1;
            const double z = ep.initial->mean(j)[0] + std::sqrt(ep.initial->cov(j).variances()[0]) * N01(rng);
            const auto c = ctx.scalars().at(t);
            const auto l = ctx.linear().at(t);
            auto lp = [&](double xx) {
                return oracle::log_psi(tar, c.a_minus, c.b_minus, c.c_minus, l.theta_x[0], l.theta_y[0], c0.c_minus,
                                       c0.b_minus * z + l0.theta_y[0], xx);
            };
            const double fd = oracle::central_diff(lp, x);
            worst = std::max(worst, relerr(shifted_score(ctx, v1(z), t, v1(x))[0], fd, 1.0));
            // delta start
            const auto dc = dctx.scalars().at(t);
            const auto dl = dctx.linear().at(t);
            auto dlp = [&](double xx) {
                return oracle::log_psi(tar, dc.a_minus, dc.b_minus, dc.c_minus, dl.theta_x[0], dl.theta_y[0],
                                       dctx.scalars().a_plus_terminal(), dctx.theta_plus_terminal()[0], xx);
            };
            const double u = score_at(dctx, t, v1(x))[0];
            worst = std::max(worst, relerr(u, oracle::central_diff(dlp, x), 1.0));
            if (i % 4 == 0) {
                const double dlogp = oracle::central_diff(
                    [&](double xx) { return std::log(marginal_density(dctx, t, v1(xx))); }, x);
                worst_cv = std::max(worst_cv, std::abs(u - (dlogp + dc.a_plus * x - dl.theta_plus[0])));
            }
        }
    }
    o.detail << "A and B, 200 points each, mixture and delta starts: max rel err " << worst
             << "; cross-validation residual " << worst_cv;
    o.require(worst < 1e-4, "score gradient");
    o.require(worst_cv < 1e-4, "cross-validation identity");
    return o;
}

// ---- 4 ---------------------------------------------------------------------
GaussianMixture random_mixture(std::mt19937_64& rng, int d) {
    std::uniform_int_distribution<int> K(1, 3);
    std::uniform_real_distribution<double> M(-3.0, 5.0), S(0.15, 1.5), W(0.2, 1.0);
    const int k = K(rng);
    std::vector<double> w;
    std::vector<Vec> m;
    std::vector<Covariance> c;
    double tot = 0.0;
    for (int i = 0; i < k; ++i) {
        w.push_back(W(rng));
        tot += w.back();
        Vec mu(d);
        for (int j = 0; j < d; ++j) mu[j] = M(rng);
        m.push_back(mu);
        Vec var(d);
        for (int j = 0; j < d; ++j) var[j] = std::pow(S(rng), 2);
        c.push_back(Covariance::diagonal(var));
    }
    for (double& x : w) x /= tot;
    return GaussianMixture(w, m, c);
}

Outcome theorem() {
    Outcome o;
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> b0(1.0, 20.0), gm(0.4, 1.0);
    const int Ms[] = {8, 12, 16};  // at least as fine as the reference protocol
    std::vector<PwcSchedule> scheds;
    for (int s = 0; s < 3; ++s) scheds.push_back(geometric_schedule(b0(rng), gm(rng), Ms[s]));
    double worst = 0.0;  // deviation / allowance
    for (int p = 0; p < 5; ++p) {
        const auto ini = random_mixture(rng, 2), tar = random_mixture(rng, 2);
        for (const auto& s : scheds) {
            SimConfig c{.target = tar, .schedule = s, .initial = ini};
            c.batch = 8000;
            c.n_steps = 2500;
            c.seed = 1000 + static_cast<std::uint64_t>(p);
            const auto r = run_bridge(c);
            for (int q = 0; q <= 10; ++q) {
                const int n = q * 250;
                const double t = r.time[static_cast<std::size_t>(n)];
                const Vec lin = (1 - t) * ini.mean() + t * tar.mean();
                for (int j = 0; j < 2; ++j) {
                    const double allow = 3 * r.std_trace(j, n) / std::sqrt(8000.0) + 0.01;
                    worst = std::max(worst, std::abs(r.mean_trace(j, n) - lin[j]) / allow);
                }
            }
        }
    }
    o.detail << "5 endpoint pairs x 3 schedules, d = 2, B = 8000: worst deviation = " << worst
             << " of the allowance (3 se + 0.01)";
    o.require(worst < 1.0, "mean off the linear interpolant");
    return o;
}

// ---- 5 ---------------------------------------------------------------------
Outcome table1() {
    Outcome o;
    struct Ref {
        const char* name;
        double ia0, iam, mf, saving;
    };
    for (const Ref& ref : {Ref{"scenario-a", 31.30, 29.68, 27.67, 11.6}, Ref{"scenario-b", 17.15, 15.47, 13.27, 22.6}}) {
        auto cfg = preset(ref.name);
        const auto res = run_experiment(cfg, {});
        const auto& pr = res.front();
        const auto& e0 = pr.find(GuidanceMode::IaZero)->report;
        const auto& em = pr.find(GuidanceMode::IaTargetMean)->report;
        const auto& ef = pr.find(GuidanceMode::MfLinear)->report;
        const double sum_ref = ref.ia0 + ref.iam + ref.mf, sum = e0.total + em.total + ef.total;
        const double sep1 = (em.total - ef.total) / paired_se(em.particle_energy, ef.particle_energy);
        const double sep2 = (e0.total - em.total) / paired_se(e0.particle_energy, em.particle_energy);
        o.detail << ref.name << ": (" << e0.total << ", " << em.total << ", " << ef.total << ") saving "
                 << pr.saving_percent() << "%, separations " << sep1 << "/" << sep2 << " se; ";
        o.require(std::abs(sum / sum_ref - 1.0) < 0.05, std::string(ref.name) + " totals");
        o.require(std::abs(e0.total / ref.ia0 - 1.0) < 0.08 && std::abs(em.total / ref.iam - 1.0) < 0.08 &&
                      std::abs(ef.total / ref.mf - 1.0) < 0.08,
                  std::string(ref.name) + " per-mode");
        o.require(sep1 > 3.0 && sep2 > 3.0, std::string(ref.name) + " ordering");
        o.require(std::abs(pr.saving_percent() - ref.saving) < 2.0, std::string(ref.name) + " saving");
    }
    return o;
}

// ---- 6 ---------------------------------------------------------------------
Outcome table2() {
    Outcome o;
    auto cfg = preset("d-sweep");
    cfg.sweep_values = {1, 2, 4, 8};
    const double ref_mf[] = {12.26, 13.07, 13.37, 13.57}, ref_0[] = {16.17, 16.96, 17.22, 17.40},
                 ref_m[] = {14.34, 15.13, 15.41, 15.59};
    const auto res = run_experiment(cfg, {});
    // Flatness is judged on the multi-zone points d >= 2. The single-zone point sits ~6% low in the
    // reference column as well, so it is reported rather than gated.
    double lo = 1e300, hi = 0.0, mean = 0.0, worst_abs = 0.0;
    for (std::size_t i = 1; i < res.size(); ++i) mean += res[i].per_zone(GuidanceMode::MfLinear) / (res.size() - 1);
    for (std::size_t i = 0; i < res.size(); ++i) {
        const auto& pr = res[i];
        const double mf = pr.per_zone(GuidanceMode::MfLinear);
        if (i > 0) {
            lo = std::min(lo, mf);
            hi = std::max(hi, mf);
        }
        worst_abs = std::max({worst_abs, std::abs(mf / ref_mf[i] - 1), std::abs(pr.per_zone(GuidanceMode::IaZero) / ref_0[i] - 1),
                              std::abs(pr.per_zone(GuidanceMode::IaTargetMean) / ref_m[i] - 1)});
        o.detail << "d=" << pr.value << ": E/d " << mf << " saving " << pr.saving_percent() << "% (" << pr.wall_seconds
                 << " s); ";
        o.require(pr.saving_percent() >= 19.0 && pr.saving_percent() <= 25.0, "saving band");
    }
    const double ref_mean = (ref_mf[1] + ref_mf[2] + ref_mf[3]) / 3.0;
    o.detail << "MF E/d spread (d>=2) " << lo / mean - 1 << ".." << hi / mean - 1 << "; d=1 at "
             << res[0].per_zone(GuidanceMode::MfLinear) / mean - 1 << " (reference " << ref_mf[0] / ref_mean - 1
             << "); worst vs Table 2 "
             << worst_abs;
    o.require(lo / mean > 0.95 && hi / mean < 1.05, "MF per-zone flatness");
    o.require(worst_abs < 0.15, "absolute E/d");
    return o;
}

// ---- 7 ---------------------------------------------------------------------
Outcome sweeps() {
    Outcome o;
    {
        auto cfg = preset("k-sweep");
        const double ref[] = {19.3, 21.0, 21.6, 22.4};
        const auto res = run_experiment(cfg, {});
        for (std::size_t i = 0; i < res.size(); ++i) {
            const auto& pr = res[i];
            const auto& a = pr.find(GuidanceMode::IaZero)->report;
            const auto& b = pr.find(GuidanceMode::IaTargetMean)->report;
            const double gap = std::abs(a.total - b.total);
            o.detail << "K=" << pr.value << ": " << pr.saving_percent() << "% (IA gap " << gap << "); ";
            o.require(std::abs(pr.saving_percent() - ref[i]) < 2.0, "K saving");
            o.require(gap <= 3.0 * paired_se(a.particle_energy, b.particle_energy) + 1e-12, "IA baselines coincide");
        }
    }
    {
        auto cfg = preset("ar-sweep");
        const double ref[] = {22.0, 21.8, 21.0};
        const auto res = run_experiment(cfg, {});
        for (std::size_t i = 0; i < res.size(); ++i) {
            o.detail << "rho=" << res[i].value << ": " << res[i].saving_percent() << "%; ";
            o.require(std::abs(res[i].saving_percent() - ref[i]) < 2.0, "rho saving");
        }
    }
    return o;
}

// ---- 8 ---------------------------------------------------------------------
Outcome fixed_point() {
    Outcome o;
    struct Ref {
        const char* name;
        double residual;
    };
    for (const Ref& ref : {Ref{"scenario-a", 0.078}, Ref{"scenario-b", 0.030}}) {
        const auto cfg = preset(ref.name);
        const SimConfig sc = sim_config(cfg, GuidanceMode::MfLinear);
        const Mat lin = guidance_centres(sc);
        const auto fp = run_fixed_point(sc, cfg.fp_tol, cfg.fp_max_iter);
        const double res = (fp.centres - lin).cwiseAbs().maxCoeff();
        o.detail << ref.name << ": " << fp.iterations << " iterations, last update " << fp.max_update.back()
                 << ", max residual " << res << "; ";
        o.require(fp.converged && fp.iterations <= 15, std::string(ref.name) + " convergence");
        o.require(res <= 1.5 * ref.residual, std::string(ref.name) + " residual");
    }
    return o;
}

// ---- 9 ---------------------------------------------------------------------
Outcome trivial_limits() {
    Outcome o;
    const int d = 3;
    const PwcSchedule flat({0.0, 1.0}, {0.0}, true);
    const GaussianMixture std_normal({1.0}, {Vec::Zero(d)}, {Covariance::isotropic(d, 1.0)});
    const ScoreContext ctx(flat, Mat::Zero(1, d), std_normal);
    std::mt19937_64 rng(909);
    std::normal_distribution<double> N(0.0, 2.0);
    std::uniform_real_distribution<double> T(0.001, 0.999);
    double umax = 0.0;
    for (int i = 0; i < 500; ++i) {
        Vec x(d);
        for (int j = 0; j < d; ++j) x[j] = N(rng);
        umax = std::max(umax, score_at(ctx, T(rng), x).norm());
    }
    SimConfig c{.target = std_normal, .schedule = flat};
    c.batch = 2000;
    c.n_steps = 500;
    const double energy = run_bridge(c).total;
    o.detail << "max |u| " << umax << ", energy " << energy;
    o.require(umax < 1e-6 && energy < 1e-10, "zero control");

    // single component: affine score
    const auto sched = geometric_schedule(12.0, 0.65, 8);
    const GaussianMixture one({1.0}, {v1(1.1)}, {Covariance::isotropic(1, 0.35)});
    const ScoreContext c1(sched, linear_guidance(v1(0.0), v1(1.1)), one);
    double worst_r2 = 1.0;
    for (double t : {0.05, 0.3, 0.6, 0.9, 0.99}) {
        Mat x(1, 81);
        for (int i = 0; i < 81; ++i) x(0, i) = -4.0 + 0.1 * i;
        worst_r2 = std::min(worst_r2, affine_fit(c1, t, x, Mat::Zero(1, 81)).r2);
    }
    o.detail << "; K=1 worst R^2 = 1 - " << 1.0 - worst_r2;
    o.require(worst_r2 >= 1.0 - 1e-10, "affine score");

    // translation equivariance
    const Endpoints ep = build_endpoints(preset("scenario-b"));
    const Vec shift = v1(-3.7);
    const auto ti = ep.initial->translated(shift), tt = ep.target.translated(shift);
    const ScoreContext a(sched, linear_guidance(ep.initial->mean(), ep.target.mean()), ep.target, ep.initial);
    const ScoreContext b(sched, linear_guidance(ti.mean(), tt.mean()), tt, ti);
    double worst_eq = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double t = T(rng), x = N(rng) + 1.0, z = N(rng) + 3.0;
        const double ua = shifted_score(a, v1(z), t, v1(x))[0];
        const double ub = shifted_score(b, v1(z) + shift, t, v1(x) + shift)[0];
        worst_eq = std::max(worst_eq, relerr(ub, ua, 1.0));
    }
    o.detail << "; translation " << worst_eq;
    o.require(worst_eq < 1e-10, "translation equivariance");
    return o;
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* title;
        double budget_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> all{
        {1, "LQG closed forms", 10, lqg_closed_form},
        {2, "Green coefficients", 30, green_coefficients},
        {3, "score master check", 60, score_master},
        {4, "linear guidance theorem", 300, theorem},
        {5, "Table 1", 600, table1},
        {6, "Table 2 (d = 1..8)", 900, table2},
        {7, "K and AR(1) sweeps", 1200, sweeps},
        {8, "fixed-point consistency", 1e300, fixed_point},
        {9, "trivial limits", 1e300, trivial_limits},
    };
    int failed = 0;
    for (const auto& c : all) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "exception: " << e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > c.budget_s) o.require(false, "runtime budget");
        std::printf("%s criterion %d: %s (%.1f s) %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title, secs,
                    o.detail.str().c_str());
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
