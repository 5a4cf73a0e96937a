#include "rplm/plm.hpp"

#include "rplm/errors.hpp"
#include "rplm/linalg.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <limits>

namespace rplm {

namespace {

void require_same_manifold(const Dataset& data, const SmootherConfig& cfg) {
    if (!(data.manifold() == cfg.manifold())) {
        throw ContractViolation("dataset lives on " + data.manifold().describe() + " but smoother uses " +
                                cfg.manifold().describe());
    }
}

Eigen::MatrixXd responses_and_covariates(const Dataset& data) {
    Eigen::MatrixXd yx(static_cast<Eigen::Index>(data.n()), static_cast<Eigen::Index>(data.p() + 1));
    yx.col(0) = data.y();
    yx.rightCols(static_cast<Eigen::Index>(data.p())) = data.x();
    return yx;
}

}  // namespace

Dataset::Dataset(ManifoldSpec manifold, Eigen::VectorXd y, Eigen::MatrixXd x, std::vector<ManifoldPoint> t)
    : manifold_(std::move(manifold)), y_(std::move(y)), x_(std::move(x)), t_(std::move(t)) {
    const auto n = static_cast<Eigen::Index>(t_.size());
    if (y_.size() != n || x_.rows() != n) {
        throw ContractViolation("dataset lengths disagree: y=" + std::to_string(y_.size()) + ", X rows=" +
                                std::to_string(x_.rows()) + ", t=" + std::to_string(n));
    }
    if (x_.cols() < 1) {
        throw ContractViolation("dataset needs at least one linear covariate");
    }
    if (n < 1) {
        throw ContractViolation("dataset is empty");
    }
    if (!y_.allFinite() || !x_.allFinite()) {
        throw ContractViolation("dataset contains non-finite values");
    }
    for (const auto& point : t_) {
        if (point.size() != manifold_.coordinate_count()) {
            throw InvalidPoint("point " + to_string(point) + " does not belong to " + manifold_.describe());
        }
    }
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    Eigen::VectorXd y(static_cast<Eigen::Index>(indices.size()));
    Eigen::MatrixXd x(static_cast<Eigen::Index>(indices.size()), x_.cols());
    std::vector<ManifoldPoint> t;
    t.reserve(indices.size());
    for (std::size_t k = 0; k < indices.size(); ++k) {
        auto i = static_cast<Eigen::Index>(indices[k]);
        y(static_cast<Eigen::Index>(k)) = y_(i);
        x.row(static_cast<Eigen::Index>(k)) = x_.row(i);
        t.push_back(t_.at(indices[k]));
    }
    return Dataset(manifold_, std::move(y), std::move(x), std::move(t));
}

Eigen::MatrixXd PlmFit::covariance() const {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(sigma_hat);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.vectorD().minCoeff() <= 0.0) {
        throw SingularMatrix("estimated covariate covariance is singular");
    }
    Eigen::MatrixXd inv = ldlt.solve(Eigen::MatrixXd::Identity(sigma_hat.rows(), sigma_hat.cols()));
    return sigma2_eps_hat * inv / static_cast<double>(n());
}

Eigen::VectorXd PlmFit::standard_errors() const { return covariance().diagonal().cwiseSqrt(); }

Eigen::VectorXd PlmFit::g_at_sample() const { return phi0_at_sample - phi_at_sample * beta_hat; }

CenteredCovariates center_covariates(const Dataset& data, const SmootherConfig& cfg) {
    return center_covariates(data, cfg, DistanceTable::pairwise(data.manifold(), data.t()));
}

CenteredCovariates center_covariates(const Dataset& data, const SmootherConfig& cfg, const DistanceTable& pairwise) {
    require_same_manifold(data, cfg);
    if (pairwise.rows() != static_cast<Eigen::Index>(data.n()) || pairwise.cols() != pairwise.rows()) {
        throw ContractViolation("distance table does not match the dataset");
    }
    Eigen::MatrixXd s;
    try {
        s = smoother_matrix(pairwise, cfg.kernel(), cfg.bandwidth());
    } catch (const EmptyNeighborhood& e) {
        throw FitUndefined(e.index().value_or(0));
    }
    Eigen::MatrixXd smooth = s * responses_and_covariates(data);
    return {smooth.col(0), smooth.rightCols(static_cast<Eigen::Index>(data.p()))};
}

PlmFit fit_beta(const Dataset& data, const SmootherConfig& cfg) {
    return fit_beta(data, cfg, DistanceTable::pairwise(data.manifold(), data.t()));
}

PlmFit fit_beta(const Dataset& data, const SmootherConfig& cfg, const DistanceTable& pairwise) {
    if (data.n() < data.p() + 2) {
        throw ContractViolation("fitting needs n >= p + 2 observations");
    }
    auto centered = center_covariates(data, cfg, pairwise);
    Eigen::MatrixXd x_tilde = data.x() - centered.phi;
    Eigen::VectorXd y_tilde = data.y() - centered.phi0;
    auto ls = solve_least_squares(x_tilde, y_tilde);

    const double n = static_cast<double>(data.n());
    const double p = static_cast<double>(data.p());
    PlmFit fit;
    fit.beta_hat = std::move(ls.coefficients);
    fit.bandwidth = cfg.bandwidth();
    fit.sigma2_eps_hat = ls.residual_sum_of_squares / (n - p);
    fit.sigma_hat = (x_tilde.transpose() * x_tilde) / n;
    // exact symmetry for downstream factorizations
    fit.sigma_hat = 0.5 * (fit.sigma_hat + fit.sigma_hat.transpose()).eval();
    fit.phi0_at_sample = std::move(centered.phi0);
    fit.phi_at_sample = std::move(centered.phi);
    fit.residuals = std::move(ls.residuals);
    return fit;
}

double estimate_g(const PlmFit& fit, const Dataset& data, const SmootherConfig& cfg, const ManifoldPoint& query) {
    require_same_manifold(data, cfg);
    auto w = normalized_weights(cfg, query, data.t());
    Eigen::Map<const Eigen::RowVectorXd> weights(w.data(), static_cast<Eigen::Index>(w.size()));
    double phi0 = weights * data.y();
    Eigen::RowVectorXd phi = weights * data.x();
    return phi0 - phi.dot(fit.beta_hat);
}

Eigen::VectorXd estimate_g(const PlmFit& fit, const Dataset& data, const SmootherConfig& cfg,
                           std::span<const ManifoldPoint> queries) {
    require_same_manifold(data, cfg);
    auto table = DistanceTable::between(data.manifold(), queries, data.t());
    Eigen::MatrixXd s = smoother_matrix(table, cfg.kernel(), cfg.bandwidth());
    return s * data.y() - (s * data.x()) * fit.beta_hat;
}

WaldResult wald_test(const PlmFit& fit, const Eigen::VectorXd& beta0, std::size_t n) {
    if (beta0.size() != fit.beta_hat.size()) {
        throw ContractViolation("beta0 has " + std::to_string(beta0.size()) + " entries, expected " +
                                std::to_string(fit.beta_hat.size()));
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(fit.sigma_hat);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.vectorD().minCoeff() <= 0.0) {
        throw SingularMatrix("estimated covariate covariance is singular");
    }
    WaldResult out;
    out.dof = static_cast<int>(beta0.size());
    Eigen::VectorXd diff = fit.beta_hat - beta0;
    double quad = static_cast<double>(n) * diff.dot(fit.sigma_hat * diff);
    if (quad == 0.0) {
        out.statistic = 0.0;
    } else if (fit.sigma2_eps_hat > 0.0) {
        out.statistic = quad / fit.sigma2_eps_hat;
    } else {
        out.statistic = std::numeric_limits<double>::infinity();
    }
    if (std::isfinite(out.statistic)) {
        boost::math::chi_squared chi2(out.dof);
        out.p_value = boost::math::cdf(boost::math::complement(chi2, out.statistic));
    } else {
        out.p_value = 0.0;
    }
    return out;
}

}  // namespace rplm
