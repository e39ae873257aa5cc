#include "mfpid/score.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace mfpid {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

void check_open(double t) {
    if (!(t > 0.0 && t < 1.0)) {
        std::ostringstream os;
        os << "score: t = " << t << " outside (0,1)";
        throw ValidationError(os.str());
    }
}

Mat inverse_of(const ScoreContext::Slice::Factor& f, int d) {
    if (f.s_diag.size() > 0) return f.s_diag.cwiseInverse().asDiagonal();
    return f.llt.solve(Mat::Identity(d, d));
}

} // namespace

// ===========================================================================
// DenseMixture
// ===========================================================================

double DenseMixture::log_pdf(const Vec& x) const {
    double mx = -std::numeric_limits<double>::infinity();
    std::vector<double> lw(weights.size());
    for (std::size_t k = 0; k < weights.size(); ++k) {
        lw[k] = std::log(weights[k]) + log_normal_dense(x, means[k], covs[k]);
        mx = std::max(mx, lw[k]);
    }
    double acc = 0.0;
    for (double v : lw) acc += std::exp(v - mx);
    return mx + std::log(acc);
}

Vec DenseMixture::mean() const {
    Vec m = Vec::Zero(means.front().size());
    for (std::size_t k = 0; k < weights.size(); ++k) m += weights[k] * means[k];
    return m;
}

// ===========================================================================
// Context
// ===========================================================================

void ScoreContext::Workspace::resize(int d, std::size_t K) {
    for (Vec* v : {&xs, &mu, &r, &y, &y_hat, &tx, &dn}) v->resize(d);
    logw.resize(static_cast<Eigen::Index>(K));
    m_bar.assign(K, Vec(d));
}

ScoreContext::ScoreContext(const PwcSchedule& schedule, const GuidanceTrajectory& guidance, GaussianMixture target,
                           std::optional<GaussianMixture> initial)
    : ScoreContext(schedule, guidance.centres(schedule), std::move(target), std::move(initial)) {}

ScoreContext::ScoreContext(const PwcSchedule& schedule, const Mat& centres, GaussianMixture target,
                           std::optional<GaussianMixture> initial)
    : scalars_(std::make_shared<const GreenCoefficients>(schedule)),
      target_(std::move(target)),
      initial_(std::move(initial)),
      centres_(centres) {
    const int d = target_.dim();
    if (centres_.cols() != d) throw ValidationError("guidance dimension does not match the target");
    if (initial_ && initial_->dim() != d) throw ValidationError("initial and target dimensions differ");
    Mat src(centres_.rows(), d + 1);
    src.leftCols(d) = centres_;
    src.col(d).setOnes();
    linear_ = std::make_unique<const LinearCoefficients>(scalars_, std::move(src));
    const Vec& tp = linear_->theta_plus_terminal();
    theta_plus_one_ = tp.head(d);
    lambda_plus_one_ = tp[d];
    for (double w : target_.weights()) log_w_.push_back(std::log(w));
}

ScoreContext::Slice ScoreContext::slice(double t) const {
    check_open(t);
    const int d = dim();
    Slice s;
    s.t = t;
    s.interval = schedule().interval_of(t);
    s.c = scalars_->on_interval(s.interval, t);
    s.K = s.c.c_minus - scalars_->a_plus_terminal();
    if (!(s.K > 0.0) || !std::isfinite(s.K)) {
        std::ostringstream os;
        os << "score: K_t = " << s.K << " is not positive at t = " << t;
        throw NumericalError(os.str());
    }
    const LinearCoeffs lc = linear_->on_interval(s.interval, t);
    s.theta_plus = lc.theta_plus.head(d);
    s.theta_x = lc.theta_x.head(d);
    s.theta_y = lc.theta_y.head(d);
    s.lambda_plus = lc.theta_plus[d];
    s.lambda_x = lc.theta_x[d];
    s.lambda_y = lc.theta_y[d];
    s.nu = centres_.row(static_cast<Eigen::Index>(s.interval)).transpose();

    const double inv_k = 1.0 / s.K;
    s.factors.resize(target_.size());
    for (std::size_t k = 0; k < target_.size(); ++k) {
        const Covariance& cov = target_.cov(k);
        auto& f = s.factors[k];
        if (cov.is_diagonal()) {
            f.s_diag = cov.variances().array() + inv_k;
            f.gain_diag = cov.variances().array() / f.s_diag.array();
            f.log_det = f.s_diag.array().log().sum();
        } else {
            const Mat sig = cov.matrix();
            Mat S = sig;
            S.diagonal().array() += inv_k;
            f.llt.compute(S);
            if (f.llt.info() != Eigen::Success) throw NumericalError("score: S_k(t) is not positive definite");
            f.gain = f.llt.solve(sig).transpose();  // Sigma S^{-1} (both symmetric)
            f.log_det = 2.0 * Mat(f.llt.matrixL()).diagonal().array().log().sum();
        }
    }
    return s;
}

void ScoreContext::drift(const Slice& s, const Eigen::Ref<const Vec>& x, const Eigen::Ref<const Vec>& z,
                         const Vec* nu_override, Workspace& ws, Eigen::Ref<Vec> u) const {
    const double a = s.c.a_minus, b = s.c.b_minus, K = s.K;
    ws.xs = x - z;
    ws.tx = s.theta_x - s.lambda_x * z;
    ws.mu = (b * ws.xs + (s.theta_y - s.lambda_y * z) - (theta_plus_one_ - lambda_plus_one_ * z)) / K;
    if (nu_override) {
        ws.dn = *nu_override - s.nu;
        ws.mu += (1.0 - b / K) * ws.dn;
    }

    const std::size_t nk = target_.size();
    for (std::size_t k = 0; k < nk; ++k) {
        const auto& f = s.factors[k];
        ws.r = ws.mu - (target_.mean(k) - z);
        double quad = 0.0;
        if (f.s_diag.size() > 0) {
            quad = (ws.r.array().square() / f.s_diag.array()).sum();
            ws.m_bar[k] = target_.mean(k) - z + f.gain_diag.cwiseProduct(ws.r);
        } else {
            ws.y = ws.r;
            f.llt.matrixL().solveInPlace(ws.y);
            quad = ws.y.squaredNorm();
            ws.m_bar[k].noalias() = f.gain * ws.r;
            ws.m_bar[k] += target_.mean(k) - z;
        }
        ws.logw[static_cast<Eigen::Index>(k)] = log_w_[k] - 0.5 * f.log_det - 0.5 * quad;
    }
    const double mx = ws.logw.maxCoeff();
    double norm = 0.0;
    for (Eigen::Index k = 0; k < ws.logw.size(); ++k) {
        ws.logw[k] = std::exp(ws.logw[k] - mx);
        norm += ws.logw[k];
    }
    ws.y_hat.setZero();
    for (std::size_t k = 0; k < nk; ++k) ws.y_hat += (ws.logw[static_cast<Eigen::Index>(k)] / norm) * ws.m_bar[k];

    u = b * ws.y_hat - a * ws.xs + ws.tx;
    if (nu_override) u -= (b - a) * ws.dn;
}

Probe ScoreContext::probe(const Slice& s, const Vec& x, const Vec& z) const {
    Probe p;
    p.K = s.K;
    p.mu = (s.c.b_minus * (x - z) + (s.theta_y - s.lambda_y * z) - (theta_plus_one_ - lambda_plus_one_ * z)) / s.K + z;
    return p;
}

Posterior ScoreContext::posterior(const Slice& s, const Vec& x, const Vec& z) const {
    Workspace ws;
    ws.resize(dim(), target_.size());
    Vec u(dim());
    drift(s, x, z, nullptr, ws, u);
    Posterior p;
    p.pi_bar = ws.logw / ws.logw.sum();
    p.m_bar = ws.m_bar;
    for (auto& m : p.m_bar) m += z;
    p.y_hat = ws.y_hat + z;
    return p;
}

RawLinear ScoreContext::raw_linear(const Slice& s) const {
    return {s.theta_x - (s.c.a_minus - s.c.b_minus) * s.nu, s.theta_y - (s.c.c_minus - s.c.b_minus) * s.nu,
            s.theta_plus - s.c.a_plus * s.nu};
}

// ===========================================================================
// Marginal laws
// ===========================================================================

namespace {

struct ComponentForm {
    Eigen::LLT<Mat> M;
    Mat Sinv;
    Vec h;
    double log_w = 0.0;
};

} // namespace

DenseMixture ScoreContext::conditional_marginal(const Slice& s, const Vec& z) const {
    const int d = dim();
    const double K = s.K, b = s.c.b_minus, alpha = b / K;
    const Vec tp = s.theta_plus - s.lambda_plus * z;
    const Vec tx = s.theta_x - s.lambda_x * z;
    const Vec dbar = ((s.theta_y - s.lambda_y * z) - (theta_plus_one_ - lambda_plus_one_ * z)) / K;
    const double diag = s.c.a_plus + s.c.a_minus - b * b / K;

    DenseMixture out;
    std::vector<double> lw;
    for (std::size_t k = 0; k < target_.size(); ++k) {
        const Mat Sinv = inverse_of(s.factors[k], d);
        Mat M = alpha * alpha * Sinv;
        M.diagonal().array() += diag;
        const Vec off = target_.mean(k) - z - dbar;
        const Vec h = tp + tx + b * dbar + alpha * (Sinv * off);
        Eigen::LLT<Mat> llt(M);
        if (llt.info() != Eigen::Success) throw NumericalError("marginal: M_k(t) is not positive definite");
        const Vec mh = llt.solve(h);
        const double logdet_m = 2.0 * Mat(llt.matrixL()).diagonal().array().log().sum();
        lw.push_back(log_w_[k] - 0.5 * s.factors[k].log_det - 0.5 * logdet_m + 0.5 * h.dot(mh) -
                     0.5 * off.dot(Sinv * off));
        out.means.push_back(z + mh);
        out.covs.push_back(llt.solve(Mat::Identity(d, d)));
    }
    const double mx = *std::max_element(lw.begin(), lw.end());
    double norm = 0.0;
    for (double& v : lw) norm += (v = std::exp(v - mx));
    for (double v : lw) out.weights.push_back(v / norm);
    return out;
}

DenseMixture ScoreContext::marginal(const Slice& s) const {
    const int d = dim();
    if (!initial_) return conditional_marginal(s, Vec::Zero(d));

    // Conditional means are affine in the start: mu_k(z) = mu_k(0) + A_k z.
    const double K = s.K, b = s.c.b_minus, alpha = b / K;
    const double delta = (s.lambda_y - lambda_plus_one_) / K;
    const DenseMixture at0 = conditional_marginal(s, Vec::Zero(d));
    DenseMixture out;
    for (std::size_t j = 0; j < initial_->size(); ++j) {
        const Mat sig_j = initial_->cov(j).matrix();
        for (std::size_t k = 0; k < target_.size(); ++k) {
            const Mat Sinv = inverse_of(s.factors[k], d);
            Mat Q = alpha * (1.0 - delta) * Sinv;
            Q.diagonal().array() += s.lambda_plus + s.lambda_x + b * delta;
            const Mat A = Mat::Identity(d, d) - at0.covs[k] * Q;
            out.weights.push_back(initial_->weight(j) * target_.weight(k));
            out.means.push_back(at0.means[k] + A * initial_->mean(j));
            out.covs.push_back(at0.covs[k] + A * sig_j * A.transpose());
        }
    }
    return out;
}

// ===========================================================================
// Free functions
// ===========================================================================

Probe probe(const ScoreContext& ctx, double t, const Vec& x) {
    return ctx.probe(ctx.slice(t), x, Vec::Zero(ctx.dim()));
}

Posterior posterior(const ScoreContext& ctx, double t, const Vec& x) {
    return ctx.posterior(ctx.slice(t), x, Vec::Zero(ctx.dim()));
}

Vec score_at(const ScoreContext& ctx, double t, const Vec& x) {
    return shifted_score(ctx, Vec::Zero(ctx.dim()), t, x);
}

Vec shifted_score(const ScoreContext& ctx, const Vec& z, double t, const Vec& x) {
    if (x.size() != ctx.dim() || z.size() != ctx.dim()) throw ValidationError("score: dimension mismatch");
    ScoreContext::Workspace ws;
    ws.resize(ctx.dim(), ctx.target().size());
    Vec u(ctx.dim());
    ctx.drift(ctx.slice(t), x, z, nullptr, ws, u);
    return u;
}

double marginal_density(const ScoreContext& ctx, double t, const Vec& x) {
    return ctx.marginal(ctx.slice(t)).pdf(x);
}

} // namespace mfpid
