#include "mfpid/greens.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <string>

namespace mfpid {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSmall = 1e-8;  // below this w*tau the leading Taylor term is exact in double

// (cosh(w tau) - 1)/w^2
double cosh_m1_over(double w, double tau) {
    const double x = w * tau;
    if (x < kSmall) return 0.5 * tau * tau;
    const double s = std::sinh(0.5 * x);
    return 2.0 * s * s / (w * w);
}

// 1 - sech(x), without the cancellation
double one_minus_sech(double x) {
    const double s = std::sinh(0.5 * x);
    return 2.0 * s * s / std::cosh(x);
}

void check_grid(const PwcSchedule& s, std::span<const double> grid) {
    if (grid.size() < 2 || grid.front() != 0.0 || grid.back() != 1.0)
        throw ValidationError("coefficient grid must span [0,1]");
    std::vector<int> count(s.intervals(), 0);
    for (double t : grid) ++count[s.interval_of(t)];
    for (std::size_t i = 0; i < count.size(); ++i)
        if (count[i] < 8)
            throw ValidationError("coefficient grid resolves interval " + std::to_string(i) +
                                  " with only " + std::to_string(count[i]) + " points (need 8)");
}

} // namespace

double tanh_over(double w, double tau) {
    const double x = w * tau;
    return x < kSmall ? tau : std::tanh(x) / w;
}

double sinh_over(double w, double tau) {
    const double x = w * tau;
    return x < kSmall ? tau : std::sinh(x) / w;
}

// ===========================================================================
// Scalar coefficients
// ===========================================================================

GreenCoefficients::GreenCoefficients(PwcSchedule schedule) : schedule_(std::move(schedule)) {
    const std::size_t M = schedule_.intervals();
    a_plus_left_.assign(M, kInf);
    phases_.assign(M, 0.0);
    for (std::size_t i = 1; i < M; ++i) {
        a_plus_left_[i] = forward(i - 1, schedule_.start(i));
        const double w = schedule_.omega(i);
        if (w == 0.0) {
            phases_[i] = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        const double x = a_plus_left_[i] / w;
        if (!(x > 1.0 + 1e-12))
            throw NumericalError("forward phase: a+(t_" + std::to_string(i) + ") = " +
                                 std::to_string(a_plus_left_[i]) + " is not above omega = " +
                                 std::to_string(w));
        phases_[i] = 0.5 * std::log1p(2.0 / (x - 1.0));
    }
    a_plus_one_ = forward(M - 1, 1.0);

    a_right_.assign(M, kInf);
    b_right_.assign(M, kInf);
    c_right_.assign(M, kInf);
    for (std::size_t i = M - 1; i-- > 0;) {
        const ScalarCoeffs r = on_interval(i + 1, schedule_.end(i));
        a_right_[i] = r.a_minus;
        b_right_[i] = r.b_minus;
        c_right_[i] = r.c_minus;
    }
}

double GreenCoefficients::forward(std::size_t i, double t) const {
    const double tau = t - schedule_.start(i);
    const double w = schedule_.omega(i);
    const double T = tanh_over(w, tau);
    if (i == 0) return 1.0 / T;
    const double ai = a_plus_left_[i];
    return (ai + schedule_.beta(i) * T) / (1.0 + ai * T);
}

ScalarCoeffs GreenCoefficients::on_interval(std::size_t i, double t) const {
    ScalarCoeffs out;
    out.a_plus = forward(i, t);

    const double tau = schedule_.end(i) - t;
    const double w = schedule_.omega(i);
    const double T = tanh_over(w, tau);
    const double ch = std::cosh(w * tau);
    if (i + 1 == schedule_.intervals()) {
        out.a_minus = 1.0 / T;
        out.c_minus = out.a_minus;
        out.b_minus = 1.0 / (T * ch);
        return out;
    }
    const double a1 = a_right_[i], b1 = b_right_[i], c1 = c_right_[i];
    const double den = 1.0 + a1 * T;
    out.a_minus = (a1 + schedule_.beta(i) * T) / den;
    out.b_minus = b1 / (ch * den);
    out.c_minus = c1 - b1 * b1 * T / den;
    return out;
}

ScalarCoeffs GreenCoefficients::at(double t) const {
    return on_interval(schedule_.interval_of(t), t);
}

// ===========================================================================
// Linear coefficients
// ===========================================================================

LinearCoefficients::LinearCoefficients(std::shared_ptr<const GreenCoefficients> scalars, Mat sources)
    : scalars_(std::move(scalars)), sources_(std::move(sources)) {
    const PwcSchedule& s = scalars_->schedule();
    const std::size_t M = s.intervals();
    if (static_cast<std::size_t>(sources_.rows()) != M)
        throw ValidationError("linear coefficients: expected " + std::to_string(M) +
                              " guidance rows, got " + std::to_string(sources_.rows()));
    if (!sources_.allFinite()) throw ValidationError("linear coefficients: non-finite guidance");
    const Eigen::Index d = sources_.cols();

    plus_left_.assign(M, Vec::Zero(d));
    for (std::size_t i = 1; i < M; ++i) plus_left_[i] = forward(i - 1, s.start(i));
    theta_plus_one_ = forward(M - 1, 1.0);

    x_right_.assign(M, Vec::Zero(d));
    y_right_.assign(M, Vec::Zero(d));
    for (std::size_t i = M - 1; i-- > 0;) backward(i + 1, s.end(i), x_right_[i], y_right_[i]);
}

Vec LinearCoefficients::forward(std::size_t i, double t) const {
    const PwcSchedule& s = scalars_->schedule();
    const double tau = t - s.start(i);
    const double w = s.omega(i), beta = s.beta(i);
    const double S = sinh_over(w, tau);
    const double cm1 = cosh_m1_over(w, tau);
    const auto nu = sources_.row(static_cast<Eigen::Index>(i)).transpose();
    if (i == 0) {
        if (tau == 0.0) return Vec::Zero(sources_.cols());
        return (beta * cm1 / S) * nu;
    }
    const double ai = scalars_->a_plus_left(i);
    const double D = std::cosh(w * tau) + ai * S;
    return (plus_left_[i] + (beta * (S + ai * cm1)) * nu) / D;
}

void LinearCoefficients::backward(std::size_t i, double t, Vec& tx, Vec& ty) const {
    const PwcSchedule& s = scalars_->schedule();
    const double tau = s.end(i) - t;
    const double w = s.omega(i), beta = s.beta(i);
    const auto nu = sources_.row(static_cast<Eigen::Index>(i)).transpose();
    if (i + 1 == s.intervals()) {
        // (a - b) = (c - b) = w tanh(w tau / 2)
        tx = (beta * tanh_over(w, 0.5 * tau)) * nu;
        ty = tx;
        return;
    }
    const double T = tanh_over(w, tau);
    const double oms = one_minus_sech(w * tau);
    const double a1 = scalars_->a_minus_right(i), b1 = scalars_->b_minus_right(i);
    const double den = 1.0 + a1 * T;
    const double ratio = 1.0 / (std::cosh(w * tau) * den);  // b / b1
    tx = ratio * x_right_[i] + ((a1 * oms + beta * T) / den) * nu;
    ty = y_right_[i] + (b1 * T / den) * x_right_[i] + (b1 * oms / den) * nu;
}

LinearCoeffs LinearCoefficients::on_interval(std::size_t i, double t) const {
    LinearCoeffs out;
    out.theta_plus = forward(i, t);
    backward(i, t, out.theta_x, out.theta_y);
    return out;
}

LinearCoeffs LinearCoefficients::at(double t) const {
    return on_interval(scalars_->schedule().interval_of(t), t);
}

// ===========================================================================
// Tables
// ===========================================================================

std::vector<double> uniform_grid(int n_steps) {
    if (n_steps < 1) throw ValidationError("grid needs at least one step");
    std::vector<double> g(static_cast<std::size_t>(n_steps) + 1);
    for (int j = 0; j <= n_steps; ++j) g[static_cast<std::size_t>(j)] = static_cast<double>(j) / n_steps;
    g.back() = 1.0;
    return g;
}

ForwardScalar forward_scalar(const PwcSchedule& schedule, std::span<const double> grid) {
    check_grid(schedule, grid);
    const GreenCoefficients g(schedule);
    ForwardScalar out;
    out.a_plus.reserve(grid.size());
    for (double t : grid) out.a_plus.push_back(g.at(t).a_plus);
    out.phases.assign(g.phases().begin(), g.phases().end());
    return out;
}

BackwardScalar backward_scalar(const PwcSchedule& schedule, std::span<const double> grid) {
    check_grid(schedule, grid);
    const GreenCoefficients g(schedule);
    BackwardScalar out;
    for (double t : grid) {
        const ScalarCoeffs c = g.at(t);
        out.a_minus.push_back(c.a_minus);
        out.b_minus.push_back(c.b_minus);
        out.c_minus.push_back(c.c_minus);
    }
    return out;
}

LinearTrajectories linear_coeffs(const PwcSchedule& schedule, std::span<const double> grid,
                                 const Mat& centres) {
    check_grid(schedule, grid);
    const LinearCoefficients lin(std::make_shared<const GreenCoefficients>(schedule), centres);
    const auto n = static_cast<Eigen::Index>(grid.size());
    LinearTrajectories out{Mat(n, centres.cols()), Mat(n, centres.cols()), Mat(n, centres.cols())};
    for (Eigen::Index j = 0; j < n; ++j) {
        const LinearCoeffs c = lin.at(grid[static_cast<std::size_t>(j)]);
        out.theta_plus.row(j) = c.theta_plus.transpose();
        out.theta_x.row(j) = c.theta_x.transpose();
        out.theta_y.row(j) = c.theta_y.transpose();
    }
    return out;
}

ShiftTrajectories shift_propagators(const PwcSchedule& schedule, std::span<const double> grid) {
    const LinearTrajectories lt =
        linear_coeffs(schedule, grid, Mat::Ones(static_cast<Eigen::Index>(schedule.intervals()), 1));
    ShiftTrajectories out;
    for (Eigen::Index j = 0; j < lt.theta_plus.rows(); ++j) {
        out.lambda_plus.push_back(lt.theta_plus(j, 0));
        out.lambda_x.push_back(lt.theta_x(j, 0));
        out.lambda_y.push_back(lt.theta_y(j, 0));
    }
    return out;
}

CoeffTables build_tables(const PwcSchedule& schedule, std::span<const double> grid, const Mat& centres) {
    CoeffTables t;
    t.grid.assign(grid.begin(), grid.end());
    ForwardScalar f = forward_scalar(schedule, grid);
    BackwardScalar b = backward_scalar(schedule, grid);
    LinearTrajectories l = linear_coeffs(schedule, grid, centres);
    ShiftTrajectories s = shift_propagators(schedule, grid);
    t.a_plus = std::move(f.a_plus);
    t.phi_plus = std::move(f.phases);
    t.a_minus = std::move(b.a_minus);
    t.b_minus = std::move(b.b_minus);
    t.c_minus = std::move(b.c_minus);
    t.theta_plus = std::move(l.theta_plus);
    t.theta_x_minus = std::move(l.theta_x);
    t.theta_y_minus = std::move(l.theta_y);
    t.lambda_plus = std::move(s.lambda_plus);
    t.lambda_x_minus = std::move(s.lambda_x);
    t.lambda_y_minus = std::move(s.lambda_y);
    return t;
}

void write_tables_csv(const CoeffTables& t, std::ostream& os) {
    const Eigen::Index d = t.theta_plus.cols();
    os << "t,a_plus,a_minus,b_minus,c_minus";
    for (const char* name : {"theta_plus", "theta_x", "theta_y"})
        for (Eigen::Index k = 0; k < d; ++k) os << ',' << name << '_' << k;
    os << ",lambda_plus,lambda_x,lambda_y\n";
    os.precision(17);
    for (std::size_t j = 0; j < t.grid.size(); ++j) {
        const auto r = static_cast<Eigen::Index>(j);
        os << t.grid[j] << ',' << t.a_plus[j] << ',' << t.a_minus[j] << ',' << t.b_minus[j] << ','
           << t.c_minus[j];
        for (const Mat* m : {&t.theta_plus, &t.theta_x_minus, &t.theta_y_minus})
            for (Eigen::Index k = 0; k < d; ++k) os << ',' << (*m)(r, k);
        os << ',' << t.lambda_plus[j] << ',' << t.lambda_x_minus[j] << ',' << t.lambda_y_minus[j] << '\n';
    }
}

} // namespace mfpid
