// The oracles are only useful if they are right on cases with known answers.
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

TEST_CASE("bisection") {
    CHECK(oracle::bisection_shoot([](double x) { return x * x - 2.0; }, 0.0, 2.0) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("central difference") {
    CHECK(oracle::central_diff([](double x) { return std::sin(x); }, 0.3) == doctest::Approx(std::cos(0.3)).epsilon(1e-8));
}

TEST_CASE("Riccati path with kappa = q = 0") {
    // S' = S^2 backward from S1: S(t) = S1 / (1 + S1 (1 - t))
    const oracle::RiccatiPath p(0.0, 0.0, 2.0);
    for (double t : {0.0, 0.4, 0.9}) CHECK(p.S(t) == doctest::Approx(2.0 / (1.0 + 2.0 * (1.0 - t))).epsilon(1e-10));
}

TEST_CASE("terminal variance of the free Brownian motion") {
    CHECK(oracle::terminal_variance(0.0, 0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-10));
    // OU without control: (1 - e^{-2k}) / 2k
    CHECK(oracle::terminal_variance(1.0, 0.0, 0.0) == doctest::Approx((1 - std::exp(-2.0)) / 2.0).epsilon(1e-10));
}

TEST_CASE("forward RK4 on a constant schedule") {
    const double beta = 4.0, w = 2.0;
    const oracle::PwcSpec p{{0.0, 1.0}, {beta}, {0.5}};
    const std::vector<double> ts{0.1, 0.5, 0.9};
    const auto f = oracle::rk4_forward(p, ts);
    for (std::size_t k = 0; k < ts.size(); ++k) {
        CHECK(f[k].a_plus == doctest::Approx(w / std::tanh(w * ts[k])).epsilon(1e-8));
        // theta+ = beta nu (cosh - 1) / (w sinh) for a constant source
        const double th = beta * 0.5 * (std::cosh(w * ts[k]) - 1.0) / (w * std::sinh(w * ts[k]));
        CHECK(f[k].theta_plus == doctest::Approx(th).epsilon(1e-8));
    }
    const auto b = oracle::rk4_backward(p, ts);
    for (std::size_t k = 0; k < ts.size(); ++k)
        CHECK(b[k].a == doctest::Approx(w / std::tanh(w * (1.0 - ts[k]))).epsilon(1e-8));
}

TEST_CASE("psi quadrature against a Gaussian integral") {
    // single component N(m, s^2): the integrand is Gaussian in y
    const oracle::Mixture1d tar{{1.0}, {0.7}, {0.4}};
    const double a = 2.0, b = 1.5, c = 3.0, tx = 0.2, ty = -0.1, A = 1.2, B = 0.3, x = 0.9;
    const double P = c - A + 1.0 / (0.16);
    const double L = b * x + ty - B + 0.7 / 0.16;
    const double ref = -0.5 * a * x * x + tx * x + 0.5 * L * L / P - 0.5 * 0.49 / 0.16 - 0.5 * std::log(P * 0.16);
    // the oracle leaves out the 1/sqrt(2 pi) of the target density
    CHECK(oracle::log_psi(tar, a, b, c, tx, ty, A, B, x) ==
          doctest::Approx(ref + 0.5 * std::log(2 * std::numbers::pi)).epsilon(1e-10));
}
