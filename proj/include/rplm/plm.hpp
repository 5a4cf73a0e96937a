#pragma once

#include "rplm/geometry.hpp"
#include "rplm/smoothing.hpp"

#include <Eigen/Dense>

#include <vector>

namespace rplm {

/// Responses y (n), linear covariates X (n x p) and manifold covariates t (n).
class Dataset {
public:
    /// Throws ContractViolation on inconsistent lengths, p < 1, n < 1 or
    /// non-finite entries, and InvalidPoint for points of another manifold.
    /// Estimators that need n >= p + 2 check it themselves, so small
    /// validation subsets remain representable.
    Dataset(ManifoldSpec manifold, Eigen::VectorXd y, Eigen::MatrixXd x, std::vector<ManifoldPoint> t);

    const ManifoldSpec& manifold() const noexcept { return manifold_; }
    const Eigen::VectorXd& y() const noexcept { return y_; }
    const Eigen::MatrixXd& x() const noexcept { return x_; }
    const std::vector<ManifoldPoint>& t() const noexcept { return t_; }
    std::size_t n() const noexcept { return t_.size(); }
    std::size_t p() const noexcept { return static_cast<std::size_t>(x_.cols()); }

    /// Rows `indices` in the given order.
    Dataset subset(std::span<const std::size_t> indices) const;

private:
    ManifoldSpec manifold_;
    Eigen::VectorXd y_;
    Eigen::MatrixXd x_;
    std::vector<ManifoldPoint> t_;
};

/// Kernel smooths of y and of every column of X, evaluated at the sample points.
struct CenteredCovariates {
    Eigen::VectorXd phi0;  // n
    Eigen::MatrixXd phi;   // n x p
};

struct PlmFit {
    Eigen::VectorXd beta_hat;
    double bandwidth = 0.0;
    double sigma2_eps_hat = 0.0;
    Eigen::MatrixXd sigma_hat;  // n^{-1} x~' x~
    Eigen::VectorXd phi0_at_sample;
    Eigen::MatrixXd phi_at_sample;
    Eigen::VectorXd residuals;

    std::size_t n() const noexcept { return static_cast<std::size_t>(residuals.size()); }
    /// Plug-in asymptotic covariance sigma2 * Sigma^{-1} / n.
    Eigen::MatrixXd covariance() const;
    Eigen::VectorXd standard_errors() const;
    /// g-hat at the sample points: phi0 - Phi beta.
    Eigen::VectorXd g_at_sample() const;
};

struct WaldResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
};

/// Full-sample smooths of y and X on t. Throws FitUndefined naming the
/// first observation with an empty neighborhood.
CenteredCovariates center_covariates(const Dataset& data, const SmootherConfig& cfg);
CenteredCovariates center_covariates(const Dataset& data, const SmootherConfig& cfg, const DistanceTable& pairwise);

/// Profile least-squares estimate of beta from the smoothed residuals.
/// Throws CollinearDesign when the centered design is rank deficient.
PlmFit fit_beta(const Dataset& data, const SmootherConfig& cfg);
PlmFit fit_beta(const Dataset& data, const SmootherConfig& cfg, const DistanceTable& pairwise);

/// g-hat(query) = phi0-hat(query) - phi-hat(query)' beta-hat.
double estimate_g(const PlmFit& fit, const Dataset& data, const SmootherConfig& cfg, const ManifoldPoint& query);
/// Batched estimate_g. Throws EmptyNeighborhood naming the first failing query.
Eigen::VectorXd estimate_g(const PlmFit& fit, const Dataset& data, const SmootherConfig& cfg,
                           std::span<const ManifoldPoint> queries);

/// W = n (b - b0)' Sigma (b - b0) / sigma2, chi-square with p degrees of freedom under H0.
WaldResult wald_test(const PlmFit& fit, const Eigen::VectorXd& beta0, std::size_t n);

}  // namespace rplm
