#include "mfpid/lqg.hpp"

#include "mfpid/guidance.hpp"
#include "mfpid/types.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace mfpid {

namespace {

constexpr double kLimit = 1e-8;
constexpr int kTable = 4000;  // RK4 steps for the IA mean

// Composite Simpson on n (odd) uniform points over [0,1].
template <class F>
double simpson01(F&& f, int n = 4001) {
    const double h = 1.0 / (n - 1);
    double acc = f(0.0) + f(1.0);
    for (int j = 1; j < n - 1; ++j) acc += (j % 2 ? 4.0 : 2.0) * f(j * h);
    return acc * h / 3.0;
}

template <class SFn, class MFn, class LinFn>
LqgMetrics metrics(SFn&& S, MFn&& Sigma, LinFn&& mean_and_s, int n) {
    if (n < 3) throw ValidationError("lqg metrics: need at least 3 grid points");
    auto power = [&](double t, double& mu, double& var) {
        const double St = S(t);
        double m = 0.0, s = 0.0;
        mean_and_s(t, m, s);
        mu = -(St * m + s);
        var = St * St * Sigma(t);
        return var + mu * mu;
    };
    LqgMetrics out;
    const double h = 1.0 / (n - 1);
    double mu = 0.0, var = 0.0, d0 = 0.0, d1 = 0.0;
    double E = 0.0;
    for (int j = 0; j < n; ++j) {
        const double t = j == n - 1 ? 1.0 : j * h;
        const double P = power(t, mu, var);
        if (j > 0) {
            const double tl = (j - 1) * h;
            E += h / 6.0 * (power(tl, d0, d1) + 4.0 * power(tl + 0.5 * h, d0, d1) + P);
        }
        if (!std::isfinite(P)) throw NumericalError("lqg metrics: non-finite power");
        out.t.push_back(t);
        out.mu_u.push_back(mu);
        out.sigma_u2.push_back(var);
        out.P.push_back(P);
        out.E.push_back(E);
    }
    return out;
}

} // namespace

// ===========================================================================
// Mean-field closed form
// ===========================================================================

LqgSolution::LqgSolution(const LqgProblem& p) : p_(p) {
    if (!(p.kappa >= 0.0) || !(p.q >= 0.0) || !(p.sigma_tar > 0.0) || !std::isfinite(p.m_tar) ||
        !std::isfinite(p.kappa) || !std::isfinite(p.q) || !std::isfinite(p.sigma_tar))
        throw ValidationError("lqg: need kappa >= 0, q >= 0, sigma_tar > 0 and finite m_tar");
    delta_ = std::sqrt(p.kappa * p.kappa + p.q);
    const double v = p.sigma_tar * p.sigma_tar;
    if (delta_ < kLimit) {
        limit_ = true;
        r0_ = 1.0;
        A_ = v;
        rho_ = std::numeric_limits<double>::quiet_NaN();
        if (!(v < 1.0)) {
            std::ostringstream msg;
            msg << "lqg: infeasible target variance " << v << " for the Brownian limit (need < 1)";
            throw ValidationError(msg.str());
        }
        return;
    }
    r0_ = std::exp(-2.0 * delta_);
    A_ = 2.0 * delta_ * v / -std::expm1(-2.0 * delta_);
    rho_ = (A_ - 1.0) / (A_ * r0_ - 1.0);
    if (!(rho_ > -1.0 && rho_ < 1.0)) {
        std::ostringstream msg;
        msg << "lqg: infeasible target variance " << v << " (A = " << A_ << ", r0 = " << r0_
            << ", rho = " << rho_ << ")";
        throw ValidationError(msg.str());
    }
}

LqgSolution solve_lqg(const LqgProblem& p) { return LqgSolution(p); }

double LqgSolution::S(double t) const {
    if (limit_) {
        const double c = 1.0 - A_;
        return c / (1.0 - c * t);
    }
    const double e = std::exp(-2.0 * delta_ * (1.0 - t));
    return -p_.kappa + delta_ * (1.0 + rho_ * e) / (1.0 - rho_ * e);
}

double LqgSolution::Sigma(double t) const {
    if (limit_) return t * (1.0 - (1.0 - A_) * t);
    const double e = std::exp(-2.0 * delta_ * (1.0 - t));
    return (1.0 - rho_ * e) * -std::expm1(-2.0 * delta_ * t) / (2.0 * delta_ * (1.0 - rho_ * r0_));
}

double LqgSolution::m(double t) const { return p_.m_tar * sinh_arc(p_.kappa, t); }

double LqgSolution::s(double t) const {
    const double mdot = p_.m_tar * sinh_arc_rate(p_.kappa, t);
    return -mdot - (p_.kappa + S(t)) * m(t);
}

// ===========================================================================
// Independent-agent baseline
// ===========================================================================

IaTrajectory::IaTrajectory(const LqgSolution& sol, double m_bar) : sol_(sol), m_bar_(m_bar) {
    const LqgProblem& p = sol_.problem();
    const double g1 = g(1.0);
    auto g2 = [&](double u) { const double gu = g(u); return gu * gu; };
    const double At = simpson01(g2) / g1;
    const double Bt = simpson01([&](double u) { return g2(u) * J(u); }) / g1;
    if (!std::isfinite(At) || !std::isfinite(Bt) || At == 0.0)
        throw NumericalError("ia baseline: quadrature produced a non-finite value");
    s0_ = -(p.m_tar + p.q * m_bar_ * Bt) / At;

    // mean: m' = -(kappa + S) m - s, m(0) = 0
    auto rhs = [&](double t, double m) { return -(p.kappa + sol_.S(t)) * m - s(t); };
    const double h = 1.0 / kTable;
    m_table_.assign(kTable + 1, 0.0);
    double m = 0.0;
    for (int j = 0; j < kTable; ++j) {
        const double t = j * h;
        const double k1 = rhs(t, m);
        const double k2 = rhs(t + 0.5 * h, m + 0.5 * h * k1);
        const double k3 = rhs(t + 0.5 * h, m + 0.5 * h * k2);
        const double k4 = rhs(t + h, m + h * k3);
        m += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        m_table_[static_cast<std::size_t>(j + 1)] = m;
    }
}

IaTrajectory ia_baseline(const LqgSolution& sol, double m_bar) { return IaTrajectory(sol, m_bar); }

double IaTrajectory::g(double t) const {
    const double D = sol_.delta();
    if (sol_.brownian_limit()) return 1.0 / (1.0 - (1.0 - sol_.Sigma(1.0)) * t);
    const double rho = sol_.rho(), r0 = sol_.r0();
    return std::exp(D * t) * (1.0 - rho * r0) / (1.0 - rho * std::exp(2.0 * D * (t - 1.0)));
}

double IaTrajectory::J(double t) const {
    const double D = sol_.delta();
    if (sol_.brownian_limit()) {
        const double c = 1.0 - sol_.Sigma(1.0);
        return t - 0.5 * c * t * t;
    }
    const double rho = sol_.rho(), r0 = sol_.r0();
    return (-std::expm1(-D * t) - rho * r0 * std::expm1(D * t)) / (D * (1.0 - rho * r0));
}

double IaTrajectory::s(double t) const {
    return g(t) * (s0_ + sol_.problem().q * m_bar_ * J(t));
}

double IaTrajectory::m(double t) const {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return m_table_.back();
    const double h = 1.0 / kTable;
    const auto j = std::min(static_cast<int>(t / h), kTable - 1);
    const double t0 = j * h, u = (t - t0) / h;
    const double m0 = m_table_[static_cast<std::size_t>(j)], m1 = m_table_[static_cast<std::size_t>(j + 1)];
    const double kap = sol_.problem().kappa;
    const double d0 = -(kap + sol_.S(t0)) * m0 - s(t0);
    const double d1 = -(kap + sol_.S(t0 + h)) * m1 - s(t0 + h);
    const double u2 = u * u, u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * m0 + (u3 - 2 * u2 + u) * h * d0 + (-2 * u3 + 3 * u2) * m1 +
           (u3 - u2) * h * d1;
}

// ===========================================================================
// Metrics
// ===========================================================================

LqgMetrics lqg_metrics(const LqgSolution& sol, int n_points) {
    return metrics([&](double t) { return sol.S(t); }, [&](double t) { return sol.Sigma(t); },
                   [&](double t, double& m, double& s) { m = sol.m(t); s = sol.s(t); }, n_points);
}

LqgMetrics lqg_metrics(const IaTrajectory& ia, int n_points) {
    const LqgSolution& sol = ia.solution();
    return metrics([&](double t) { return sol.S(t); }, [&](double t) { return sol.Sigma(t); },
                   [&](double t, double& m, double& s) { m = ia.m(t); s = ia.s(t); }, n_points);
}

} // namespace mfpid
