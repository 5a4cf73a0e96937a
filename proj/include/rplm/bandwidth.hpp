#pragma once

#include "rplm/plm.hpp"
#include "rplm/smoothing.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace rplm {

/// Strictly increasing list of admissible bandwidths (0 < h < inj(M)).
class BandwidthGrid {
public:
    /// Throws ContractViolation if the values are empty, unsorted, repeated,
    /// non-positive or not below the injectivity radius of `m`.
    BandwidthGrid(std::vector<double> values, const ManifoldSpec& m);

    /// Drops the values that are not admissible on `m` instead of throwing.
    static BandwidthGrid clipped(std::vector<double> values, const ManifoldSpec& m);

    const std::vector<double>& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }

private:
    std::vector<double> values_;
};

std::vector<double> linear_spaced(double lo, double hi, std::size_t count);
std::vector<double> log_spaced(double lo, double hi, std::size_t count);

/// 30 log-spaced values from the 5th percentile of pairwise distances to
/// 0.9 inj(M) (the largest pairwise distance on Euclidean space).
BandwidthGrid default_grid(const Dataset& data, std::size_t count = 30);

struct CandidateScore {
    double h = 0.0;
    double score = 0.0;  // NaN when infeasible
    bool feasible = false;
};

struct SelectionResult {
    double best_h = 0.0;
    std::vector<CandidateScore> scores;
};

/// Leave-one-out criterion: sum_i [(y_i - phi0_{-i}(t_i)) - (x_i - phi_{-i}(t_i))' b]^2
/// minimized over a single b. Empty when some leave-one-out neighborhood is empty.
std::optional<double> cv_score(const Dataset& data, double h, const KernelSpec& kernel = {});
std::optional<double> cv_score(const Dataset& data, const DistanceTable& pairwise, double h,
                               const KernelSpec& kernel = {});

/// Argmin of cv_score over the grid; ties go to the smaller h. Throws
/// NoFeasibleBandwidth when every candidate is infeasible.
SelectionResult select_cv(const Dataset& data, const BandwidthGrid& grid, const KernelSpec& kernel = {},
                          unsigned threads = 1);
SelectionResult select_cv(const Dataset& data, const DistanceTable& pairwise, const BandwidthGrid& grid,
                          const KernelSpec& kernel = {}, unsigned threads = 1);

/// Split-sample criterion: smooths fitted on `train`, evaluated at the
/// `validate` points, residual sum minimized over b on the validation rows.
std::optional<double> sv_score(const Dataset& train, const Dataset& validate, double h,
                               const KernelSpec& kernel = {});

SelectionResult select_sv(const Dataset& train, const Dataset& validate, const BandwidthGrid& grid,
                          const KernelSpec& kernel = {}, unsigned threads = 1);

/// Squared prediction error of a fully nonparametric kernel regression of
/// the responses on Euclidean predictors (one row per observation).
std::optional<double> prediction_error_ep(const Eigen::VectorXd& train_y, const Eigen::MatrixXd& train_predictors,
                                          const Eigen::VectorXd& validate_y,
                                          const Eigen::MatrixXd& validate_predictors, double h,
                                          const KernelSpec& kernel = {});

}  // namespace rplm
