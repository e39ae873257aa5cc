#include "mfpid/mixture.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace mfpid {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}
} // namespace

// ===========================================================================
// Covariance
// ===========================================================================

Covariance Covariance::isotropic(int d, double sigma) {
    if (d < 1) throw ValidationError("covariance dimension must be positive");
    return diagonal(Vec::Constant(d, sigma * sigma));
}

Covariance Covariance::diagonal(Vec variances) {
    for (Eigen::Index i = 0; i < variances.size(); ++i)
        if (!(variances[i] > 0.0) || !std::isfinite(variances[i]))
            throw ValidationError("non-PD covariance (variance " + fmt(variances[i]) + ")");
    Covariance c;
    c.kind_ = Kind::Diagonal;
    c.diag_ = std::move(variances);
    return c;
}

Covariance Covariance::ar1(int d, double sigma, double rho) {
    if (rho == 0.0) return isotropic(d, sigma);
    if (d < 1) throw ValidationError("covariance dimension must be positive");
    if (!(sigma > 0.0) || !(std::abs(rho) < 1.0))
        throw ValidationError("non-PD covariance (AR(1) sigma " + fmt(sigma) + ", rho " + fmt(rho) + ")");
    Covariance c;
    c.kind_ = Kind::Ar1;
    c.diag_ = Vec::Constant(d, sigma * sigma);
    c.sigma_ = sigma;
    c.rho_ = rho;
    return c;
}

Covariance Covariance::dense(Mat cov) {
    if (cov.rows() != cov.cols() || cov.rows() < 1) throw ValidationError("covariance must be square");
    if (!cov.isApprox(cov.transpose(), 1e-12)) throw ValidationError("covariance must be symmetric");
    Eigen::LLT<Mat> llt(cov);
    if (llt.info() != Eigen::Success) throw ValidationError("non-PD covariance");
    Covariance c;
    c.kind_ = Kind::Dense;
    c.diag_ = cov.diagonal();
    c.chol_ = llt.matrixL();
    return c;
}

Mat Covariance::matrix() const {
    switch (kind_) {
    case Kind::Diagonal:
        return diag_.asDiagonal();
    case Kind::Ar1: {
        const int d = dim();
        Mat m(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) m(i, j) = sigma_ * sigma_ * std::pow(rho_, std::abs(i - j));
        return m;
    }
    case Kind::Dense:
        return chol_ * chol_.transpose();
    }
    return {};
}

double Covariance::log_det() const {
    switch (kind_) {
    case Kind::Diagonal:
        return diag_.array().log().sum();
    case Kind::Ar1:
        return dim() * std::log(sigma_ * sigma_) + (dim() - 1) * std::log1p(-rho_ * rho_);
    case Kind::Dense:
        return 2.0 * chol_.diagonal().array().log().sum();
    }
    return 0.0;
}

double Covariance::quad_form(const Vec& r) const {
    switch (kind_) {
    case Kind::Diagonal:
        return (r.array().square() / diag_.array()).sum();
    case Kind::Ar1: {
        // tridiagonal inverse: (1/(s^2(1-rho^2))) [1, 1+rho^2, ..., 1+rho^2, 1] with -rho off-diagonal
        const int d = dim();
        double acc = 0.0;
        for (int i = 0; i < d; ++i) {
            const double w = (i == 0 || i == d - 1) ? 1.0 : 1.0 + rho_ * rho_;
            acc += w * r[i] * r[i];
            if (i + 1 < d) acc -= 2.0 * rho_ * r[i] * r[i + 1];
        }
        return acc / (sigma_ * sigma_ * (1.0 - rho_ * rho_));
    }
    case Kind::Dense: {
        Vec y = r;
        chol_.triangularView<Eigen::Lower>().solveInPlace(y);
        return y.squaredNorm();
    }
    }
    return 0.0;
}

Vec Covariance::transform(const Vec& xi) const {
    switch (kind_) {
    case Kind::Diagonal:
        return diag_.array().sqrt() * xi.array();
    case Kind::Ar1: {
        // stationary AR(1) recursion
        Vec x(xi.size());
        const double innov = sigma_ * std::sqrt(1.0 - rho_ * rho_);
        x[0] = sigma_ * xi[0];
        for (Eigen::Index i = 1; i < xi.size(); ++i) x[i] = rho_ * x[i - 1] + innov * xi[i];
        return x;
    }
    case Kind::Dense:
        return chol_ * xi;
    }
    return {};
}

// ===========================================================================
// GaussianMixture
// ===========================================================================

std::vector<std::string> GaussianMixture::check(const std::vector<double>& weights, const std::vector<Vec>& means,
                                                const std::vector<Covariance>& covs) {
    std::vector<std::string> errs;
    if (weights.empty()) {
        errs.emplace_back("mixture has no components");
        return errs;
    }
    if (means.size() != weights.size() || covs.size() != weights.size())
        errs.emplace_back("mixture: weights, means and covariances differ in length");
    double sum = 0.0;
    for (double w : weights) {
        if (!(w > 0.0) || !std::isfinite(w)) errs.push_back("weight " + fmt(w) + " is not positive");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) errs.push_back("weights sum " + fmt(sum));
    if (!means.empty()) {
        const auto d = means.front().size();
        for (const auto& m : means)
            if (m.size() != d || !m.allFinite()) errs.emplace_back("mixture means must be finite and share a dimension");
        for (const auto& c : covs)
            if (c.dim() != d) errs.emplace_back("covariance dimension does not match the means");
    }
    return errs;
}

GaussianMixture::GaussianMixture(std::vector<double> weights, std::vector<Vec> means, std::vector<Covariance> covs)
    : weights_(std::move(weights)), means_(std::move(means)), covs_(std::move(covs)) {
    const auto errs = check(weights_, means_, covs_);
    if (!errs.empty()) throw ValidationError(errs.front());
}

Vec GaussianMixture::mean() const {
    Vec m = Vec::Zero(dim());
    for (std::size_t k = 0; k < size(); ++k) m += weights_[k] * means_[k];
    return m;
}

Vec GaussianMixture::responsibilities(const Vec& x) const {
    Vec lw(static_cast<Eigen::Index>(size()));
    for (std::size_t k = 0; k < size(); ++k)
        lw[static_cast<Eigen::Index>(k)] =
            std::log(weights_[k]) - 0.5 * covs_[k].log_det() - 0.5 * covs_[k].quad_form(x - means_[k]);
    const double mx = lw.maxCoeff();
    Vec w = (lw.array() - mx).exp();
    return w / w.sum();
}

double GaussianMixture::log_pdf(const Vec& x) const {
    double mx = -std::numeric_limits<double>::infinity();
    std::vector<double> lw(size());
    for (std::size_t k = 0; k < size(); ++k) {
        lw[k] = std::log(weights_[k]) - 0.5 * covs_[k].log_det() - 0.5 * covs_[k].quad_form(x - means_[k]);
        mx = std::max(mx, lw[k]);
    }
    double acc = 0.0;
    for (double v : lw) acc += std::exp(v - mx);
    return mx + std::log(acc) - 0.5 * dim() * kLog2Pi;
}

double GaussianMixture::pdf(const Vec& x) const { return std::exp(log_pdf(x)); }

std::size_t GaussianMixture::classify(const Vec& x) const {
    Eigen::Index k = 0;
    responsibilities(x).maxCoeff(&k);
    return static_cast<std::size_t>(k);
}

GaussianMixture GaussianMixture::translated(const Vec& c) const {
    std::vector<Vec> m = means_;
    for (auto& v : m) v += c;
    return {weights_, std::move(m), covs_};
}

double log_normal_dense(const Vec& x, const Vec& m, const Mat& S) {
    Eigen::LLT<Mat> llt(S);
    if (llt.info() != Eigen::Success) throw NumericalError("non-PD covariance in density evaluation");
    Vec y = x - m;
    llt.matrixL().solveInPlace(y);
    const double logdet = 2.0 * Mat(llt.matrixL()).diagonal().array().log().sum();
    return -0.5 * (y.squaredNorm() + logdet + static_cast<double>(x.size()) * kLog2Pi);
}

} // namespace mfpid
