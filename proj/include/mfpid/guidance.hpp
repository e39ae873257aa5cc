#pragma once

#include "mfpid/schedule.hpp"
#include "mfpid/types.hpp"

#include <functional>
#include <vector>

namespace mfpid {

// sinh(kappa t)/sinh(kappa), or t when kappa < 1e-8.
[[nodiscard]] double sinh_arc(double kappa, double t);
// d/dt of the above.
[[nodiscard]] double sinh_arc_rate(double kappa, double t);

// Guidance centre nu(t). Linear, OU sinh-arc, or tabulated per interval.
class GuidanceTrajectory {
public:
    enum class Kind { Linear, SinhArc, Piecewise };

    static GuidanceTrajectory linear(Vec m_in, Vec m_tar);
    static GuidanceTrajectory sinh_arc(double kappa, Vec m_tar);
    static GuidanceTrajectory constant(Vec c) { return linear(c, c); }
    // one row per interval of `schedule`
    static GuidanceTrajectory piecewise(const PwcSchedule& schedule, Mat centres);

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] int dim() const { return static_cast<int>(a_.size()); }

    [[nodiscard]] Vec operator()(double t) const;
    // Per-interval representative values: the trajectory at interval midpoints.
    [[nodiscard]] Mat centres(const PwcSchedule& schedule) const;

private:
    Kind kind_ = Kind::Linear;
    Vec a_, b_;          // linear: (m_in, m_tar); sinh arc: (unused, m_tar)
    double kappa_ = 0.0;
    std::vector<double> breakpoints_;
    Mat table_;
};

[[nodiscard]] inline GuidanceTrajectory linear_guidance(Vec m_in, Vec m_tar) {
    return GuidanceTrajectory::linear(std::move(m_in), std::move(m_tar));
}
[[nodiscard]] GuidanceTrajectory ou_guidance(double kappa, Vec m_tar);

// Maps per-interval centres to the ensemble mean at interval midpoints.
using MeanMap = std::function<Mat(const Mat& centres)>;

struct FixedPointResult {
    GuidanceTrajectory guidance;
    Mat centres;
    std::vector<double> max_update;   // one entry per iteration
    std::vector<Mat> iterates;        // centres after each iteration
    int iterations = 0;
    bool converged = false;
};

// Plain Picard iteration nu <- map(nu), started from the constant m_tar.
[[nodiscard]] FixedPointResult fixed_point_guidance(const PwcSchedule& schedule, const Vec& m_tar,
                                                    const MeanMap& map, double tol, int max_iter);

} // namespace mfpid
