#pragma once

#include <vector>

namespace mfpid {

// Scalar TCL bridge: dx = (-kappa x + u) dt + dW, running cost q/2 (x - nu)^2,
// x_0 = 0, terminal law N(m_tar, sigma_tar^2). Control u = -(S x + s).
struct LqgProblem {
    double kappa = 0.0;
    double q = 0.0;
    double m_tar = 0.0;
    double sigma_tar = 1.0;
};

class LqgSolution {
public:
    explicit LqgSolution(const LqgProblem& p);

    [[nodiscard]] const LqgProblem& problem() const { return p_; }
    [[nodiscard]] double delta() const { return delta_; }
    [[nodiscard]] double rho() const { return rho_; }      // NaN in the Brownian limit
    [[nodiscard]] double r0() const { return r0_; }
    [[nodiscard]] double S1() const { return S(1.0); }
    [[nodiscard]] bool brownian_limit() const { return limit_; }

    [[nodiscard]] double S(double t) const;
    [[nodiscard]] double Sigma(double t) const;
    [[nodiscard]] double m(double t) const;     // mean-field mean
    [[nodiscard]] double s(double t) const;     // mean-field linear coefficient

private:
    LqgProblem p_;
    double delta_ = 0.0, r0_ = 0.0, A_ = 0.0, rho_ = 0.0;
    bool limit_ = false;
};

[[nodiscard]] LqgSolution solve_lqg(const LqgProblem& p);

// Independent-agent baseline with exogenous constant centre m_bar.
// Shares S and Sigma with the mean-field solution.
class IaTrajectory {
public:
    IaTrajectory(const LqgSolution& sol, double m_bar);

    [[nodiscard]] const LqgSolution& solution() const { return sol_; }
    [[nodiscard]] double m_bar() const { return m_bar_; }
    [[nodiscard]] double s0() const { return s0_; }

    [[nodiscard]] double g(double t) const;
    [[nodiscard]] double J(double t) const;
    [[nodiscard]] double s(double t) const;
    [[nodiscard]] double m(double t) const;   // cubic Hermite on an RK4 table

private:
    LqgSolution sol_;
    double m_bar_;
    double s0_ = 0.0;
    std::vector<double> m_table_;
};

[[nodiscard]] IaTrajectory ia_baseline(const LqgSolution& sol, double m_bar);

struct LqgMetrics {
    std::vector<double> t;
    std::vector<double> mu_u;      // E[u]
    std::vector<double> sigma_u2;  // Var[u]
    std::vector<double> P;         // E[u^2]
    std::vector<double> E;         // int_0^t P
};

[[nodiscard]] LqgMetrics lqg_metrics(const LqgSolution& sol, int n_points = 4001);
[[nodiscard]] LqgMetrics lqg_metrics(const IaTrajectory& ia, int n_points = 4001);

} // namespace mfpid
