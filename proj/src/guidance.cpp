#include "mfpid/guidance.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace mfpid {

double sinh_arc(double kappa, double t) {
    if (kappa < 1e-8) return t;
    return std::sinh(kappa * t) / std::sinh(kappa);
}

double sinh_arc_rate(double kappa, double t) {
    if (kappa < 1e-8) return 1.0;
    return kappa * std::cosh(kappa * t) / std::sinh(kappa);
}

GuidanceTrajectory GuidanceTrajectory::linear(Vec m_in, Vec m_tar) {
    if (m_in.size() != m_tar.size())
        throw ValidationError("linear guidance: endpoint dimensions differ");
    GuidanceTrajectory g;
    g.kind_ = Kind::Linear;
    g.a_ = std::move(m_in);
    g.b_ = std::move(m_tar);
    return g;
}

GuidanceTrajectory GuidanceTrajectory::sinh_arc(double kappa, Vec m_tar) {
    if (!(kappa >= 0.0)) throw ValidationError("OU guidance: kappa must be nonnegative");
    GuidanceTrajectory g;
    g.kind_ = kappa < 1e-8 ? Kind::Linear : Kind::SinhArc;
    g.a_ = Vec::Zero(m_tar.size());
    g.b_ = std::move(m_tar);
    g.kappa_ = kappa;
    return g;
}

GuidanceTrajectory GuidanceTrajectory::piecewise(const PwcSchedule& schedule, Mat centres) {
    if (static_cast<std::size_t>(centres.rows()) != schedule.intervals())
        throw ValidationError("piecewise guidance: need one row per interval");
    GuidanceTrajectory g;
    g.kind_ = Kind::Piecewise;
    g.breakpoints_.assign(schedule.breakpoints().begin(), schedule.breakpoints().end());
    g.a_ = centres.row(0).transpose();
    g.b_ = centres.row(centres.rows() - 1).transpose();
    g.table_ = std::move(centres);
    return g;
}

GuidanceTrajectory ou_guidance(double kappa, Vec m_tar) {
    return GuidanceTrajectory::sinh_arc(kappa, std::move(m_tar));
}

Vec GuidanceTrajectory::operator()(double t) const {
    switch (kind_) {
    case Kind::Linear:
        return (1.0 - t) * a_ + t * b_;
    case Kind::SinhArc:
        return ::mfpid::sinh_arc(kappa_, t) * b_;
    case Kind::Piecewise: {
        std::size_t i = 0;
        while (i + 2 < breakpoints_.size() && t >= breakpoints_[i + 1]) ++i;
        return table_.row(static_cast<Eigen::Index>(i)).transpose();
    }
    }
    return {};
}

Mat GuidanceTrajectory::centres(const PwcSchedule& schedule) const {
    if (kind_ == Kind::Piecewise) {
        if (static_cast<std::size_t>(table_.rows()) != schedule.intervals())
            throw ValidationError("piecewise guidance built for a different schedule");
        return table_;
    }
    Mat c(static_cast<Eigen::Index>(schedule.intervals()), dim());
    for (std::size_t i = 0; i < schedule.intervals(); ++i)
        c.row(static_cast<Eigen::Index>(i)) = (*this)(schedule.midpoint(i)).transpose();
    return c;
}

FixedPointResult fixed_point_guidance(const PwcSchedule& schedule, const Vec& m_tar, const MeanMap& map,
                                      double tol, int max_iter) {
    if (!(tol > 0.0) || max_iter < 1) throw ValidationError("fixed point: need tol > 0 and max_iter >= 1");
    const auto M = static_cast<Eigen::Index>(schedule.intervals());
    Mat nu = m_tar.transpose().replicate(M, 1);

    FixedPointResult out{GuidanceTrajectory::piecewise(schedule, nu), nu, {}, {}, 0, false};
    double best = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= max_iter; ++k) {
        Mat next = map(nu);
        if (next.rows() != nu.rows() || next.cols() != nu.cols())
            throw ValidationError("fixed point: mean map returned the wrong shape");
        if (!next.allFinite()) throw NumericalError("fixed point: non-finite mean at iteration " + std::to_string(k));
        const double upd = (next - nu).rowwise().norm().maxCoeff();
        out.max_update.push_back(upd);
        out.iterates.push_back(next);
        out.iterations = k;
        nu = std::move(next);
        if (upd < best) {
            best = upd;
            out.centres = nu;
        }
        if (upd < tol) {
            out.converged = true;
            out.centres = nu;
            break;
        }
    }
    out.guidance = GuidanceTrajectory::piecewise(schedule, out.centres);
    return out;
}

} // namespace mfpid
