#pragma once

#include "mfpid/greens.hpp"
#include "mfpid/guidance.hpp"
#include "mfpid/mixture.hpp"

#include <cmath>
#include <memory>
#include <optional>
#include <vector>

namespace mfpid {

struct Probe {
    double K = 0.0;
    Vec mu;
};

struct Posterior {
    Vec pi_bar;
    std::vector<Vec> m_bar;
    Vec y_hat;
};

// Re-centred ("raw") linear coefficients recovered from the thetas.
struct RawLinear {
    Vec r_minus, s_minus, s_plus;
};

// Finite Gaussian mixture with dense covariances (marginal laws).
struct DenseMixture {
    std::vector<double> weights;
    std::vector<Vec> means;
    std::vector<Mat> covs;

    [[nodiscard]] double log_pdf(const Vec& x) const;
    [[nodiscard]] double pdf(const Vec& x) const { return std::exp(log_pdf(x)); }
    [[nodiscard]] Vec mean() const;
};

class ScoreContext {
public:
    // Everything the drift needs at one time, filled once per step.
    struct Slice {
        struct Factor {
            Vec s_diag, gain_diag;   // diagonal path: S_k and Sigma_k S_k^{-1}
            Eigen::LLT<Mat> llt;     // dense path
            Mat gain;
            double log_det = 0.0;
        };
        double t = 0.0;
        std::size_t interval = 0;
        ScalarCoeffs c;
        double K = 0.0;
        Vec theta_plus, theta_x, theta_y;
        double lambda_plus = 0.0, lambda_x = 0.0, lambda_y = 0.0;
        Vec nu;
        std::vector<Factor> factors;
    };

    struct Workspace {
        Vec xs, mu, r, y, y_hat, tx, dn;
        Vec logw;
        std::vector<Vec> m_bar;
        void resize(int d, std::size_t K);
    };

    ScoreContext(const PwcSchedule& schedule, const Mat& centres, GaussianMixture target,
                 std::optional<GaussianMixture> initial = std::nullopt);
    ScoreContext(const PwcSchedule& schedule, const GuidanceTrajectory& guidance, GaussianMixture target,
                 std::optional<GaussianMixture> initial = std::nullopt);

    [[nodiscard]] int dim() const { return target_.dim(); }
    [[nodiscard]] const PwcSchedule& schedule() const { return scalars_->schedule(); }
    [[nodiscard]] const GreenCoefficients& scalars() const { return *scalars_; }
    [[nodiscard]] const LinearCoefficients& linear() const { return *linear_; }
    [[nodiscard]] const GaussianMixture& target() const { return target_; }
    [[nodiscard]] const std::optional<GaussianMixture>& initial() const { return initial_; }
    [[nodiscard]] const Mat& centres() const { return centres_; }
    [[nodiscard]] const Vec& theta_plus_terminal() const { return theta_plus_one_; }
    [[nodiscard]] double lambda_plus_terminal() const { return lambda_plus_one_; }

    // t in (0,1); throws when K_t <= 0.
    [[nodiscard]] Slice slice(double t) const;

    // u* at x for start z. With nu_override the batch mean replaces the
    // analytic centre (closed loop). Allocation-free once ws is sized.
    void drift(const Slice& s, const Eigen::Ref<const Vec>& x, const Eigen::Ref<const Vec>& z,
               const Vec* nu_override, Workspace& ws, Eigen::Ref<Vec> u) const;

    [[nodiscard]] Probe probe(const Slice& s, const Vec& x, const Vec& z) const;
    [[nodiscard]] Posterior posterior(const Slice& s, const Vec& x, const Vec& z) const;
    [[nodiscard]] RawLinear raw_linear(const Slice& s) const;

    // Law of x_t given x_0 = z.
    [[nodiscard]] DenseMixture conditional_marginal(const Slice& s, const Vec& z) const;
    // Law of x_t for the context's start (delta at 0 or the initial mixture).
    [[nodiscard]] DenseMixture marginal(const Slice& s) const;

private:
    std::shared_ptr<const GreenCoefficients> scalars_;
    std::unique_ptr<const LinearCoefficients> linear_;  // d theta columns + 1 lambda column
    GaussianMixture target_;
    std::optional<GaussianMixture> initial_;
    Mat centres_;
    Vec theta_plus_one_;
    double lambda_plus_one_ = 0.0;
    std::vector<double> log_w_;
};

// Convenience entry points; t in (0,1).
[[nodiscard]] Probe probe(const ScoreContext& ctx, double t, const Vec& x);
[[nodiscard]] Posterior posterior(const ScoreContext& ctx, double t, const Vec& x);
[[nodiscard]] Vec score_at(const ScoreContext& ctx, double t, const Vec& x);
[[nodiscard]] Vec shifted_score(const ScoreContext& ctx, const Vec& z, double t, const Vec& x);
[[nodiscard]] double marginal_density(const ScoreContext& ctx, double t, const Vec& x);

} // namespace mfpid
