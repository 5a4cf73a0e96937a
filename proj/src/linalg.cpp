#include "rplm/linalg.hpp"

#include "rplm/errors.hpp"

namespace rplm {

bool has_full_column_rank(const Eigen::MatrixXd& design) {
    if (design.cols() == 0 || design.rows() < design.cols()) {
        return false;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(design);
    const auto& sv = svd.singularValues();
    double largest = sv(0);
    double smallest = sv(sv.size() - 1);
    return largest > 0.0 && smallest > kRankTolerance * largest;
}

LeastSquaresSolution solve_least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& response) {
    if (design.rows() != response.size()) {
        throw ContractViolation("design and response lengths differ");
    }
    if (!has_full_column_rank(design)) {
        throw CollinearDesign("centered design is rank deficient (relative singular value cutoff 1e-10)");
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    LeastSquaresSolution out;
    out.coefficients = qr.solve(response);
    out.residuals = response - design * out.coefficients;
    out.residual_sum_of_squares = out.residuals.squaredNorm();
    return out;
}

double minimized_residual_sum(const Eigen::MatrixXd& design, const Eigen::VectorXd& response) {
    if (design.rows() != response.size()) {
        throw ContractViolation("design and response lengths differ");
    }
    if (design.cols() == 0 || design.rows() == 0) {
        return response.squaredNorm();
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
    cod.setThreshold(kRankTolerance);
    cod.compute(design);
    if (cod.rank() == 0) {
        return response.squaredNorm();
    }
    Eigen::VectorXd coef = cod.solve(response);
    return (response - design * coef).squaredNorm();
}

}  // namespace rplm
