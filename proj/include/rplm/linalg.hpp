#pragma once

#include <Eigen/Dense>

namespace rplm {

/// Singular values below this fraction of the largest one count as zero.
inline constexpr double kRankTolerance = 1e-10;

struct LeastSquaresSolution {
    Eigen::VectorXd coefficients;
    Eigen::VectorXd residuals;
    double residual_sum_of_squares = 0.0;
};

/// argmin_b |A b - y|^2 via column-pivoted Householder QR. Throws
/// CollinearDesign when A does not have full column rank.
LeastSquaresSolution solve_least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& response);

/// min_b |A b - y|^2, i.e. the squared norm of y projected off the column
/// space of A. Well defined for rank-deficient or wide A.
double minimized_residual_sum(const Eigen::MatrixXd& design, const Eigen::VectorXd& response);

/// True when the smallest singular value exceeds kRankTolerance times the largest.
bool has_full_column_rank(const Eigen::MatrixXd& design);

}  // namespace rplm
