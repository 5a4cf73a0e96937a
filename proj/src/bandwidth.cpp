#include "rplm/bandwidth.hpp"

#include "rplm/errors.hpp"
#include "rplm/linalg.hpp"
#include "rplm/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rplm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool admissible(double h, const ManifoldSpec& m) {
    return h > 0.0 && std::isfinite(h) && h < injectivity_radius(m);
}

Eigen::MatrixXd stack_y_x(const Dataset& data) {
    Eigen::MatrixXd yx(static_cast<Eigen::Index>(data.n()), static_cast<Eigen::Index>(data.p() + 1));
    yx.col(0) = data.y();
    yx.rightCols(static_cast<Eigen::Index>(data.p())) = data.x();
    return yx;
}

/// Residual sum after profiling the smooths `smooth` (columns y, x_1..x_p) out of `target`.
double profiled_sum(const Dataset& target, const Eigen::MatrixXd& smooth) {
    Eigen::VectorXd y_tilde = target.y() - smooth.col(0);
    Eigen::MatrixXd x_tilde = target.x() - smooth.rightCols(static_cast<Eigen::Index>(target.p()));
    return minimized_residual_sum(x_tilde, y_tilde);
}

template <class Score>
SelectionResult select_by(const BandwidthGrid& grid, unsigned threads, Score&& score) {
    SelectionResult out;
    out.scores.resize(grid.size());
    parallel_for(grid.size(), threads, [&](std::size_t k) {
        double h = grid.values()[k];
        auto s = score(h);
        out.scores[k] = CandidateScore{h, s.value_or(kNaN), s.has_value()};
    });
    bool found = false;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : out.scores) {
        if (c.feasible && (!found || c.score < best)) {
            best = c.score;
            out.best_h = c.h;
            found = true;
        }
    }
    if (!found) {
        throw NoFeasibleBandwidth("no bandwidth in the grid gives nonempty neighborhoods for every observation");
    }
    return out;
}

}  // namespace

BandwidthGrid::BandwidthGrid(std::vector<double> values, const ManifoldSpec& m) : values_(std::move(values)) {
    if (values_.empty()) {
        throw ContractViolation("bandwidth grid is empty");
    }
    for (std::size_t k = 0; k < values_.size(); ++k) {
        if (!admissible(values_[k], m)) {
            throw ContractViolation("bandwidth " + std::to_string(values_[k]) + " is not admissible on " +
                                    m.describe());
        }
        if (k > 0 && !(values_[k] > values_[k - 1])) {
            throw ContractViolation("bandwidth grid must be strictly increasing");
        }
    }
}

BandwidthGrid BandwidthGrid::clipped(std::vector<double> values, const ManifoldSpec& m) {
    std::erase_if(values, [&](double h) { return !admissible(h, m); });
    return BandwidthGrid(std::move(values), m);
}

std::vector<double> linear_spaced(double lo, double hi, std::size_t count) {
    if (count == 0) {
        return {};
    }
    if (count == 1) {
        return {lo};
    }
    std::vector<double> out(count);
    double step = (hi - lo) / static_cast<double>(count - 1);
    for (std::size_t k = 0; k < count; ++k) {
        out[k] = lo + step * static_cast<double>(k);
    }
    out.back() = hi;
    return out;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
    if (!(lo > 0.0) || !(hi > 0.0)) {
        throw ContractViolation("log-spaced grid needs positive endpoints");
    }
    auto exponents = linear_spaced(std::log(lo), std::log(hi), count);
    std::vector<double> out;
    out.reserve(count);
    for (double e : exponents) {
        out.push_back(std::exp(e));
    }
    if (!out.empty()) {
        out.front() = lo;
        out.back() = hi;
    }
    return out;
}

BandwidthGrid default_grid(const Dataset& data, std::size_t count) {
    const auto& t = data.t();
    std::vector<double> d;
    d.reserve(t.size() * (t.size() - 1) / 2);
    for (std::size_t i = 0; i < t.size(); ++i) {
        for (std::size_t j = i + 1; j < t.size(); ++j) {
            d.push_back(distance(data.manifold(), t[i], t[j]));
        }
    }
    std::erase_if(d, [](double v) { return v <= 0.0; });
    if (d.empty()) {
        throw ContractViolation("cannot build a bandwidth grid: all sample points coincide");
    }
    std::sort(d.begin(), d.end());
    double lo = d[static_cast<std::size_t>(0.05 * static_cast<double>(d.size() - 1))];
    double inj = injectivity_radius(data.manifold());
    double hi = std::isfinite(inj) ? 0.9 * inj : d.back();
    if (!(lo < hi)) {
        lo = 0.1 * hi;
    }
    return BandwidthGrid(log_spaced(lo, hi, count), data.manifold());
}

std::optional<double> cv_score(const Dataset& data, double h, const KernelSpec& kernel) {
    return cv_score(data, DistanceTable::pairwise(data.manifold(), data.t()), h, kernel);
}

std::optional<double> cv_score(const Dataset& data, const DistanceTable& pairwise, double h,
                               const KernelSpec& kernel) {
    if (data.n() < 3) {
        throw ContractViolation("cross-validation needs at least three observations");
    }
    if (pairwise.rows() != static_cast<Eigen::Index>(data.n()) || pairwise.cols() != pairwise.rows()) {
        throw ContractViolation("distance table does not match the dataset");
    }
    Eigen::MatrixXd s;
    try {
        s = smoother_matrix(pairwise, kernel, h, /*leave_one_out=*/true);
    } catch (const EmptyNeighborhood&) {
        return std::nullopt;
    }
    return profiled_sum(data, s * stack_y_x(data));
}

SelectionResult select_cv(const Dataset& data, const BandwidthGrid& grid, const KernelSpec& kernel,
                          unsigned threads) {
    return select_cv(data, DistanceTable::pairwise(data.manifold(), data.t()), grid, kernel, threads);
}

SelectionResult select_cv(const Dataset& data, const DistanceTable& pairwise, const BandwidthGrid& grid,
                          const KernelSpec& kernel, unsigned threads) {
    return select_by(grid, threads, [&](double h) { return cv_score(data, pairwise, h, kernel); });
}

namespace {

std::optional<double> sv_score_cached(const Dataset& validate, const DistanceTable& table,
                                      const Eigen::MatrixXd& train_yx, double h, const KernelSpec& kernel) {
    Eigen::MatrixXd s;
    try {
        s = smoother_matrix(table, kernel, h);
    } catch (const EmptyNeighborhood&) {
        return std::nullopt;
    }
    return profiled_sum(validate, s * train_yx);
}

void require_compatible(const Dataset& train, const Dataset& validate) {
    if (!(train.manifold() == validate.manifold())) {
        throw ContractViolation("training and validation sets live on different manifolds");
    }
    if (train.p() != validate.p()) {
        throw ContractViolation("training and validation sets have different numbers of covariates");
    }
}

}  // namespace

std::optional<double> sv_score(const Dataset& train, const Dataset& validate, double h, const KernelSpec& kernel) {
    require_compatible(train, validate);
    auto table = DistanceTable::between(train.manifold(), validate.t(), train.t());
    return sv_score_cached(validate, table, stack_y_x(train), h, kernel);
}

SelectionResult select_sv(const Dataset& train, const Dataset& validate, const BandwidthGrid& grid,
                          const KernelSpec& kernel, unsigned threads) {
    require_compatible(train, validate);
    auto table = DistanceTable::between(train.manifold(), validate.t(), train.t());
    auto train_yx = stack_y_x(train);
    return select_by(grid, threads,
                     [&](double h) { return sv_score_cached(validate, table, train_yx, h, kernel); });
}

std::optional<double> prediction_error_ep(const Eigen::VectorXd& train_y, const Eigen::MatrixXd& train_predictors,
                                          const Eigen::VectorXd& validate_y,
                                          const Eigen::MatrixXd& validate_predictors, double h,
                                          const KernelSpec& kernel) {
    if (train_y.size() != train_predictors.rows() || validate_y.size() != validate_predictors.rows()) {
        throw ContractViolation("responses and predictors have different lengths");
    }
    if (train_predictors.cols() != validate_predictors.cols() || train_predictors.cols() < 1) {
        throw ContractViolation("training and validation predictors have different dimensions");
    }
    auto m = ManifoldSpec::euclidean(static_cast<int>(train_predictors.cols()));
    auto to_points = [&](const Eigen::MatrixXd& rows) {
        std::vector<ManifoldPoint> pts;
        pts.reserve(static_cast<std::size_t>(rows.rows()));
        std::vector<double> raw(static_cast<std::size_t>(rows.cols()));
        for (Eigen::Index r = 0; r < rows.rows(); ++r) {
            for (Eigen::Index c = 0; c < rows.cols(); ++c) {
                raw[static_cast<std::size_t>(c)] = rows(r, c);
            }
            pts.push_back(validate_point(m, raw));
        }
        return pts;
    };
    auto train_pts = to_points(train_predictors);
    auto validate_pts = to_points(validate_predictors);
    auto table = DistanceTable::between(m, validate_pts, train_pts);
    Eigen::MatrixXd s;
    try {
        s = smoother_matrix(table, kernel, h);
    } catch (const EmptyNeighborhood&) {
        return std::nullopt;
    }
    return (validate_y - s * train_y).squaredNorm();
}

}  // namespace rplm
