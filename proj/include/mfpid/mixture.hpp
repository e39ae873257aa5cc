#pragma once

#include "mfpid/types.hpp"

#include <string>
#include <vector>

namespace mfpid {

// SPD covariance with isotropic / diagonal / AR(1) fast paths.
class Covariance {
public:
    enum class Kind { Diagonal, Ar1, Dense };

    static Covariance isotropic(int d, double sigma);
    static Covariance diagonal(Vec variances);
    // sigma^2 rho^{|i-j|}
    static Covariance ar1(int d, double sigma, double rho);
    static Covariance dense(Mat cov);

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] int dim() const { return static_cast<int>(diag_.size()); }
    [[nodiscard]] bool is_diagonal() const { return kind_ == Kind::Diagonal; }
    [[nodiscard]] const Vec& variances() const { return diag_; }  // the diagonal of the matrix
    [[nodiscard]] Mat matrix() const;

    [[nodiscard]] double log_det() const;
    // r' Sigma^{-1} r
    [[nodiscard]] double quad_form(const Vec& r) const;
    // L xi with L L' = Sigma
    [[nodiscard]] Vec transform(const Vec& xi) const;

private:
    Kind kind_ = Kind::Diagonal;
    Vec diag_;
    double sigma_ = 0.0, rho_ = 0.0;
    Mat chol_;  // dense only
};

class GaussianMixture {
public:
    GaussianMixture(std::vector<double> weights, std::vector<Vec> means, std::vector<Covariance> covs);

    // Problems found without throwing; empty when valid.
    static std::vector<std::string> check(const std::vector<double>& weights, const std::vector<Vec>& means,
                                          const std::vector<Covariance>& covs);

    [[nodiscard]] int dim() const { return static_cast<int>(means_.front().size()); }
    [[nodiscard]] std::size_t size() const { return weights_.size(); }
    [[nodiscard]] const std::vector<double>& weights() const { return weights_; }
    [[nodiscard]] const std::vector<Vec>& means() const { return means_; }
    [[nodiscard]] const std::vector<Covariance>& covs() const { return covs_; }
    [[nodiscard]] double weight(std::size_t k) const { return weights_[k]; }
    [[nodiscard]] const Vec& mean(std::size_t k) const { return means_[k]; }
    [[nodiscard]] const Covariance& cov(std::size_t k) const { return covs_[k]; }

    [[nodiscard]] Vec mean() const;
    [[nodiscard]] double log_pdf(const Vec& x) const;
    [[nodiscard]] double pdf(const Vec& x) const;
    [[nodiscard]] Vec responsibilities(const Vec& x) const;
    [[nodiscard]] std::size_t classify(const Vec& x) const;

    [[nodiscard]] GaussianMixture translated(const Vec& c) const;

private:
    std::vector<double> weights_;
    std::vector<Vec> means_;
    std::vector<Covariance> covs_;
};

// log N(x; m, S) for a dense SPD S
[[nodiscard]] double log_normal_dense(const Vec& x, const Vec& m, const Mat& S);

} // namespace mfpid
