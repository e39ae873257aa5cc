#include "mfpid/lqg.hpp"
#include "mfpid/rng.hpp"
#include "mfpid/types.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace mfpid;

namespace {
double rel(double a, double b) { return std::abs(a - b) / std::max(1e-3, std::abs(b)); }
}

TEST_CASE("kappa = 1, q = 0 at the free variance gives rho = 0 and S = 0") {
    const LqgSolution sol({1.0, 0.0, 0.7, std::sqrt((1.0 - std::exp(-2.0)) / 2.0)});
    CHECK(std::abs(sol.rho()) < 1e-12);
    for (double t : {0.0, 0.3, 0.9, 1.0}) CHECK(std::abs(sol.S(t)) < 1e-12);
}

TEST_CASE("vanishing kappa gives a linear mean") {
    const LqgSolution sol({0.0, 1.3, 1.0, 0.4});
    CHECK(sol.m(0.5) == doctest::Approx(0.5).epsilon(1e-12));
    const LqgSolution tiny({1e-10, 0.0, 1.0, 0.5});
    CHECK(tiny.m(0.5) == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("TCL example matches the shooting oracle") {
    const LqgProblem p{0.8, 2.0, 1.5, 0.3};
    const LqgSolution sol(p);
    const auto ref = oracle::lqg_reference(p.kappa, p.q, p.m_tar, p.sigma_tar);
    CHECK(rel(sol.S1(), ref.S1) < 1e-6);
    for (double t : {0.0, 0.1, 0.37, 0.5, 0.8, 0.99, 1.0}) {
        CHECK(rel(sol.S(t), ref.S(t)) < 1e-6);
        CHECK(rel(sol.Sigma(t), ref.Sigma(t)) < 1e-6);
        CHECK(rel(sol.m(t), ref.m(t)) < 1e-6);
        CHECK(rel(sol.s(t), ref.s(t)) < 1e-6);
    }
}

TEST_CASE("IA baseline matches its shooting oracle") {
    const LqgProblem p{0.8, 2.0, 1.5, 0.3};
    const LqgSolution sol(p);
    for (double mb : {0.0, 1.5}) {
        const IaTrajectory ia(sol, mb);
        const auto ref = oracle::lqg_reference(p.kappa, p.q, p.m_tar, p.sigma_tar, false, mb);
        for (double t : {0.0, 0.25, 0.5, 0.75, 0.95})
            CHECK(rel(ia.s(t), ref.s(t)) < 1e-5);
        CHECK(std::abs(ia.m(1.0) - p.m_tar) < 1e-8);
    }
}

TEST_CASE("bridge constraints over random feasible problems") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> K(0.0, 3.0), Q(0.0, 5.0), SD(0.05, 1.5), MT(-3.0, 3.0);
    int n = 0;
    while (n < 40) {
        const LqgProblem p{K(rng), Q(rng), MT(rng), SD(rng)};
        const double dl = std::sqrt(p.kappa * p.kappa + p.q);
        if (p.sigma_tar * p.sigma_tar >= 0.98 * std::tanh(dl) / dl) continue;
        ++n;
        const LqgSolution sol(p);
        CHECK(std::abs(sol.Sigma(1.0) - p.sigma_tar * p.sigma_tar) < 1e-10);
        CHECK(std::abs(sol.m(1.0) - p.m_tar) < 1e-12);
        CHECK(std::abs(sol.rho()) < 1.0);
    }
}

TEST_CASE("ODE residuals of the closed forms") {
    const LqgProblem p{0.8, 2.0, 1.5, 0.3};
    const LqgSolution sol(p);
    const double h = 1e-5;
    for (double t = 0.01; t <= 0.99; t += 0.049) {
        const double S = sol.S(t), Sg = sol.Sigma(t), m = sol.m(t), s = sol.s(t), k = p.kappa + S;
        auto d = [&](auto f) { return (f(t + h) - f(t - h)) / (2 * h); };
        CHECK(std::abs(d([&](double u) { return sol.S(u); }) - (S * S + 2 * p.kappa * S - p.q)) < 1e-5);
        CHECK(std::abs(d([&](double u) { return sol.Sigma(u); }) - (-2 * k * Sg + 1)) < 1e-5);
        CHECK(std::abs(d([&](double u) { return sol.m(u); }) - (-k * m - s)) < 1e-5);
        CHECK(std::abs(d([&](double u) { return sol.s(u); }) - (k * s + p.q * m)) < 1e-5);
    }
}

TEST_CASE("infeasible target variance is reported") {
    CHECK_THROWS_AS(LqgSolution({0.8, 2.0, 1.5, 5.0}), ValidationError);
    CHECK_THROWS_AS(LqgSolution({0.0, 0.0, 0.0, 1.0}), ValidationError);  // Brownian limit needs sigma < 1
    CHECK_THROWS_AS(LqgSolution({0.8, 2.0, 1.5, 0.0}), ValidationError);
    CHECK_THROWS_AS(LqgSolution({-1.0, 2.0, 1.5, 0.3}), ValidationError);
}

TEST_CASE("Brownian limit") {
    const LqgSolution sol({0.0, 0.0, 2.0, 0.5});
    CHECK(sol.brownian_limit());
    CHECK(std::isnan(sol.rho()));
    CHECK(sol.Sigma(1.0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(sol.m(0.25) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("zero target: IA coefficients vanish") {
    const LqgSolution sol({0.8, 2.0, 0.0, 0.3});
    const IaTrajectory ia(sol, 0.0);
    for (double t : {0.0, 0.4, 1.0}) {
        CHECK(std::abs(ia.s(t)) < 1e-12);
        CHECK(std::abs(ia.m(t)) < 1e-12);
    }
}

TEST_CASE("q = 0: IA does not depend on the centre") {
    const LqgSolution sol({0.8, 0.0, 1.5, 0.3});
    const IaTrajectory a(sol, 0.0), b(sol, 2.7);
    for (double t : {0.0, 0.5, 0.9}) CHECK(a.s(t) == doctest::Approx(b.s(t)).epsilon(1e-12));
}

TEST_CASE("MF and IA share S and Sigma") {
    const LqgSolution sol({0.8, 2.0, 1.5, 0.3});
    const IaTrajectory ia = ia_baseline(sol, 0.75);
    for (double t : {0.1, 0.6}) {
        CHECK(ia.solution().S(t) == sol.S(t));
        CHECK(ia.solution().Sigma(t) == sol.Sigma(t));
    }
}

TEST_CASE("energy: MF below every IA centre on [0, m_tar]") {
    const LqgSolution sol({0.8, 2.0, 1.5, 0.3});
    const double e_mf = lqg_metrics(sol).E.back();
    for (double mb = 0.0; mb <= 1.5 + 1e-12; mb += 0.1875)
        CHECK(e_mf < lqg_metrics(ia_baseline(sol, mb)).E.back());
}

TEST_CASE("zero control gives zero energy") {
    const LqgSolution sol({1.0, 0.0, 0.0, std::sqrt((1.0 - std::exp(-2.0)) / 2.0)});
    const auto m = lqg_metrics(sol);
    for (double v : m.P) CHECK(std::abs(v) < 1e-20);
    CHECK(std::abs(m.E.back()) < 1e-20);
}

TEST_CASE("metrics: P = S^2 Sigma + (S m + s)^2 and E is its integral") {
    const LqgSolution sol({0.8, 2.0, 1.5, 0.3});
    const auto m = lqg_metrics(sol);
    REQUIRE(m.t.size() == 4001);
    const std::size_t i = 1234;
    const double t = m.t[i];
    const double mu = -(sol.S(t) * sol.m(t) + sol.s(t));
    CHECK(m.mu_u[i] == doctest::Approx(mu));
    CHECK(m.P[i] == doctest::Approx(sol.S(t) * sol.S(t) * sol.Sigma(t) + mu * mu));
    CHECK(m.E.front() == 0.0);
    for (std::size_t j = 1; j < m.E.size(); ++j) CHECK(m.E[j] >= m.E[j - 1]);
}

TEST_CASE("energy matches a direct Monte-Carlo run of the controlled SDE") {
    const LqgProblem p{0.8, 2.0, 1.5, 0.3};
    const LqgSolution sol(p);
    const int B = 8000, N = 2500;
    const double dt = 1.0 / N;
    std::vector<double> S(N), s(N);
    for (int n = 0; n < N; ++n) {
        S[n] = sol.S(n * dt);
        s[n] = sol.s(n * dt);
    }
    double sum = 0.0, sum2 = 0.0, msum = 0.0;
    for (int i = 0; i < B; ++i) {
        CounterRng rng(5, static_cast<std::uint64_t>(i));
        double x = 0.0, e = 0.0;
        for (int n = 0; n < N; ++n) {
            const double u = -(S[n] * x + s[n]);
            e += u * u * dt;
            x += (-p.kappa * x + u) * dt + std::sqrt(dt) * rng.normal();
        }
        sum += e;
        sum2 += e * e;
        msum += x;
    }
    const double mean = sum / B, se = std::sqrt((sum2 / B - mean * mean) / B);
    const double exact = lqg_metrics(sol).E.back();
    // Euler bias at this dt is well under one stderr
    CHECK(std::abs(mean - exact) < 3 * se + 2e-3 * exact);
    CHECK(std::abs(msum / B - p.m_tar) < 0.02);
}
