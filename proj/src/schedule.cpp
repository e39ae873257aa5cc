#include "mfpid/schedule.hpp"

#include "mfpid/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mfpid {

PwcSchedule::PwcSchedule(std::vector<double> breakpoints, std::vector<double> betas,
                         bool allow_zero_beta)
    : breakpoints_(std::move(breakpoints)), betas_(std::move(betas)) {
    if (betas_.empty())
        throw ValidationError("schedule needs at least one interval");
    if (breakpoints_.size() != betas_.size() + 1)
        throw ValidationError("schedule: expected " + std::to_string(betas_.size() + 1) +
                              " breakpoints, got " + std::to_string(breakpoints_.size()));
    if (breakpoints_.front() != 0.0 || breakpoints_.back() != 1.0)
        throw ValidationError("schedule breakpoints must start at 0 and end at 1");
    for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i)
        if (!(breakpoints_[i] < breakpoints_[i + 1]))
            throw ValidationError("schedule breakpoints must be strictly increasing");
    omegas_.reserve(betas_.size());
    for (std::size_t i = 0; i < betas_.size(); ++i) {
        const double b = betas_[i];
        if (!std::isfinite(b) || b < 0.0 || (b == 0.0 && !allow_zero_beta))
            throw ValidationError("schedule beta[" + std::to_string(i) +
                                  "] must be positive, got " + std::to_string(b));
        omegas_.push_back(std::sqrt(b));
    }
}

PwcSchedule PwcSchedule::uniform(std::vector<double> betas, bool allow_zero_beta) {
    const std::size_t M = betas.size();
    std::vector<double> bp(M + 1);
    for (std::size_t i = 0; i <= M; ++i) bp[i] = static_cast<double>(i) / static_cast<double>(M);
    bp.back() = 1.0;
    return PwcSchedule(std::move(bp), std::move(betas), allow_zero_beta);
}

std::size_t PwcSchedule::interval_of(double t) const {
    if (!(t >= 0.0 && t <= 1.0))
        throw ValidationError("interval_of: t = " + std::to_string(t) + " outside [0,1]");
    // first breakpoint strictly greater than t, minus one
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
    const auto i = static_cast<std::size_t>(it - breakpoints_.begin());
    return std::min(i - 1, betas_.size() - 1);
}

PwcSchedule geometric_schedule(double beta0, double gamma, int M) {
    if (!(beta0 > 0.0)) throw ValidationError("geometric_schedule: beta0 must be positive");
    if (!(gamma > 0.0 && gamma <= 1.0))
        throw ValidationError("geometric_schedule: gamma must lie in (0,1]");
    if (M < 1) throw ValidationError("geometric_schedule: M must be at least 1");
    std::vector<double> betas(static_cast<std::size_t>(M));
    double b = beta0;
    for (auto& x : betas) {
        x = b;
        b *= gamma;
    }
    return PwcSchedule::uniform(std::move(betas));
}

} // namespace mfpid
