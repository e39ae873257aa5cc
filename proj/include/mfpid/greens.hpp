#pragma once

#include "mfpid/schedule.hpp"
#include "mfpid/types.hpp"

#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace mfpid {

// Kernel parametrisation used throughout (un-centred):
//   G-_t(x;y) ~ exp(-a/2|x|^2 + b x.y - c/2|y|^2 + theta_x.x + theta_y.y)
//   G+_t(y;0) ~ exp(-a+/2|y|^2 + theta_plus.y)
// The theta's coincide with the re-centred coefficients (r + (a-b)nu, ...)
// and stay continuous where the piecewise guidance jumps.

struct ScalarCoeffs {
    double a_plus = 0.0;
    double a_minus = 0.0;
    double b_minus = 0.0;
    double c_minus = 0.0;
};

// tanh(w tau)/w, equal to tau at w = 0.
[[nodiscard]] double tanh_over(double w, double tau);
// sinh(w tau)/w, equal to tau at w = 0.
[[nodiscard]] double sinh_over(double w, double tau);

class GreenCoefficients {
public:
    explicit GreenCoefficients(PwcSchedule schedule);

    [[nodiscard]] const PwcSchedule& schedule() const { return schedule_; }

    // t in [0,1]; singular entries come back as +inf.
    [[nodiscard]] ScalarCoeffs at(double t) const;
    // Formula of interval i evaluated at t (may lie on either boundary).
    [[nodiscard]] ScalarCoeffs on_interval(std::size_t i, double t) const;

    [[nodiscard]] double a_plus_terminal() const { return a_plus_one_; }
    [[nodiscard]] double c_minus_initial() const { return on_interval(0, 0.0).c_minus; }

    // phi_i such that a+ = w_i coth(w_i tau + phi_i); NaN on zero-beta intervals.
    [[nodiscard]] std::span<const double> phases() const { return phases_; }

    // anchors, exposed for the linear recursions
    [[nodiscard]] double a_plus_left(std::size_t i) const { return a_plus_left_[i]; }
    [[nodiscard]] double a_minus_right(std::size_t i) const { return a_right_[i]; }
    [[nodiscard]] double b_minus_right(std::size_t i) const { return b_right_[i]; }
    [[nodiscard]] double c_minus_right(std::size_t i) const { return c_right_[i]; }

private:
    [[nodiscard]] double forward(std::size_t i, double t) const;

    PwcSchedule schedule_;
    std::vector<double> a_plus_left_;  // a+(t_i), +inf for i = 0
    std::vector<double> phases_;
    std::vector<double> a_right_, b_right_, c_right_;  // at t_{i+1}, +inf for the last
    double a_plus_one_ = 0.0;
};

struct LinearCoeffs {
    Vec theta_plus;
    Vec theta_x;
    Vec theta_y;
};

// Linear coefficients driven by per-interval sources nu_i (row i of `sources`).
// theta+(0) = 0 and theta_x(1) = theta_y(1) = 0.
class LinearCoefficients {
public:
    LinearCoefficients(std::shared_ptr<const GreenCoefficients> scalars, Mat sources);

    [[nodiscard]] int dim() const { return static_cast<int>(sources_.cols()); }
    [[nodiscard]] const Mat& sources() const { return sources_; }
    [[nodiscard]] const GreenCoefficients& scalars() const { return *scalars_; }

    [[nodiscard]] LinearCoeffs at(double t) const;
    [[nodiscard]] LinearCoeffs on_interval(std::size_t i, double t) const;
    [[nodiscard]] const Vec& theta_plus_terminal() const { return theta_plus_one_; }

private:
    [[nodiscard]] Vec forward(std::size_t i, double t) const;
    void backward(std::size_t i, double t, Vec& tx, Vec& ty) const;

    std::shared_ptr<const GreenCoefficients> scalars_;
    Mat sources_;                  // M x d
    std::vector<Vec> plus_left_;   // theta+(t_i)
    std::vector<Vec> x_right_, y_right_;  // theta_x, theta_y at t_{i+1}
    Vec theta_plus_one_;
};

// ---- dense tables ----------------------------------------------------------

[[nodiscard]] std::vector<double> uniform_grid(int n_steps);

struct ForwardScalar {
    std::vector<double> a_plus;
    std::vector<double> phases;
};
struct BackwardScalar {
    std::vector<double> a_minus, b_minus, c_minus;
};
struct LinearTrajectories {
    Mat theta_plus, theta_x, theta_y;  // grid.size() x d
};
struct ShiftTrajectories {
    std::vector<double> lambda_plus, lambda_x, lambda_y;
};

struct CoeffTables {
    std::vector<double> grid;
    std::vector<double> a_plus, a_minus, b_minus, c_minus;
    std::vector<double> phi_plus;
    Mat theta_plus, theta_x_minus, theta_y_minus;
    std::vector<double> lambda_plus, lambda_x_minus, lambda_y_minus;
};

[[nodiscard]] ForwardScalar forward_scalar(const PwcSchedule& schedule, std::span<const double> grid);
[[nodiscard]] BackwardScalar backward_scalar(const PwcSchedule& schedule, std::span<const double> grid);
[[nodiscard]] LinearTrajectories linear_coeffs(const PwcSchedule& schedule, std::span<const double> grid,
                                               const Mat& centres);
[[nodiscard]] ShiftTrajectories shift_propagators(const PwcSchedule& schedule, std::span<const double> grid);
[[nodiscard]] CoeffTables build_tables(const PwcSchedule& schedule, std::span<const double> grid,
                                       const Mat& centres);

void write_tables_csv(const CoeffTables& tables, std::ostream& os);

} // namespace mfpid
