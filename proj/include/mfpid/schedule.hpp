#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mfpid {

// Piecewise-constant stiffness protocol on [0,1].
// Intervals are [t_i, t_{i+1}); t = 1 belongs to the last one.
class PwcSchedule {
public:
    PwcSchedule(std::vector<double> breakpoints, std::vector<double> betas,
                bool allow_zero_beta = false);

    static PwcSchedule uniform(std::vector<double> betas, bool allow_zero_beta = false);

    [[nodiscard]] std::size_t intervals() const { return betas_.size(); }
    [[nodiscard]] std::span<const double> breakpoints() const { return breakpoints_; }
    [[nodiscard]] std::span<const double> betas() const { return betas_; }

    [[nodiscard]] double beta(std::size_t i) const { return betas_[i]; }
    [[nodiscard]] double omega(std::size_t i) const { return omegas_[i]; }
    [[nodiscard]] double start(std::size_t i) const { return breakpoints_[i]; }
    [[nodiscard]] double end(std::size_t i) const { return breakpoints_[i + 1]; }
    [[nodiscard]] double midpoint(std::size_t i) const {
        return 0.5 * (breakpoints_[i] + breakpoints_[i + 1]);
    }

    [[nodiscard]] std::size_t interval_of(double t) const;
    [[nodiscard]] double beta_at(double t) const { return betas_[interval_of(t)]; }

private:
    std::vector<double> breakpoints_;
    std::vector<double> betas_;
    std::vector<double> omegas_;
};

// betas[j] = beta0 * gamma^j on M uniform intervals.
[[nodiscard]] PwcSchedule geometric_schedule(double beta0, double gamma, int M);

} // namespace mfpid
