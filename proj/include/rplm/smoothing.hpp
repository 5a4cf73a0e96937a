#pragma once

#include "rplm/geometry.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace rplm {

enum class KernelKind { Quadratic };

/// Radial kernel profile K(u), u >= 0, supported on [0, 1).
struct KernelSpec {
    KernelKind kind = KernelKind::Quadratic;
    bool operator==(const KernelSpec&) const = default;
};

/// Quadratic (biweight) profile (15/16)(1 - u^2)^2 on [0, 1). Throws
/// ContractViolation for negative or non-finite u.
double kernel_eval(const KernelSpec& k, double u);

/// Geometry + kernel + bandwidth. Construction enforces 0 < h < inj(M).
class SmootherConfig {
public:
    SmootherConfig(ManifoldSpec manifold, double bandwidth, KernelSpec kernel = {});

    const ManifoldSpec& manifold() const noexcept { return manifold_; }
    const KernelSpec& kernel() const noexcept { return kernel_; }
    double bandwidth() const noexcept { return bandwidth_; }

private:
    ManifoldSpec manifold_;
    KernelSpec kernel_;
    double bandwidth_;
};

using Sample = std::span<const ManifoldPoint>;

/// Unnormalized weights a_i = K(d(query, t_i)/h) / theta_query(t_i). The
/// kernel factor is evaluated first, so points outside the support get an
/// exact zero and the density is never evaluated there.
std::vector<double> raw_weights(const SmootherConfig& cfg, const ManifoldPoint& query, Sample sample);

/// a_i / sum_k a_k. Throws EmptyNeighborhood when every a_i is zero.
std::vector<double> normalized_weights(const SmootherConfig& cfg, const ManifoldPoint& query, Sample sample);

/// Kernel regression estimate sum_i w_i y_i at `query`.
double nw_regress(const SmootherConfig& cfg, const ManifoldPoint& query, Sample sample,
                  std::span<const double> responses);

/// (n h^d)^{-1} sum_k a_k with d the intrinsic dimension. Zero on an empty
/// neighborhood.
double density_estimate(const SmootherConfig& cfg, const ManifoldPoint& query, Sample sample);

/// nw_regress at t_i using every observation except i.
double loo_regress(const SmootherConfig& cfg, std::size_t i, Sample sample, std::span<const double> responses);

/// Geodesic distances between a set of query points and a sample, computed
/// once and reused across bandwidths.
class DistanceTable {
public:
    static DistanceTable between(const ManifoldSpec& m, Sample queries, Sample sample);
    /// Queries are the sample itself; exploits symmetry.
    static DistanceTable pairwise(const ManifoldSpec& m, Sample sample);

    const ManifoldSpec& manifold() const noexcept { return manifold_; }
    const Eigen::MatrixXd& distances() const noexcept { return distances_; }
    Eigen::Index rows() const noexcept { return distances_.rows(); }
    Eigen::Index cols() const noexcept { return distances_.cols(); }
    const ManifoldPoint& query(Eigen::Index row) const { return queries_[static_cast<std::size_t>(row)]; }

    /// 1/theta for the pair; +inf where the density is undefined.
    double inverse_density(Eigen::Index row, Eigen::Index col) const;

private:
    DistanceTable(ManifoldSpec m, std::vector<ManifoldPoint> queries, Eigen::MatrixXd distances);

    ManifoldSpec manifold_;
    std::vector<ManifoldPoint> queries_;
    Eigen::MatrixXd distances_;
    Eigen::MatrixXd inverse_density_;  // empty on flat manifolds
};

/// Row-normalized smoothing matrix S(q, i) = w_h(query_q, t_i). With
/// `leave_one_out` the diagonal is zeroed before normalization (requires a
/// pairwise table). Throws EmptyNeighborhood naming the first empty row.
Eigen::MatrixXd smoother_matrix(const DistanceTable& table, const KernelSpec& kernel, double bandwidth,
                                bool leave_one_out = false);

}  // namespace rplm
