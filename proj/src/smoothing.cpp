#include "rplm/smoothing.hpp"

#include "rplm/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

namespace rplm {

namespace {

void require_same_length(Sample sample, std::span<const double> responses) {
    if (sample.size() != responses.size()) {
        throw ContractViolation("sample has " + std::to_string(sample.size()) + " points but " +
                                std::to_string(responses.size()) + " responses");
    }
}

double weighted_sum(std::span<const double> weights, std::span<const double> responses) {
    double sum = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        sum += weights[i] * responses[i];
    }
    return sum;
}

}  // namespace

double kernel_eval(const KernelSpec& k, double u) {
    if (!(u >= 0.0) || !std::isfinite(u)) {
        throw ContractViolation("kernel argument must be a finite nonnegative number");
    }
    switch (k.kind) {
    case KernelKind::Quadratic: {
        if (u >= 1.0) {
            return 0.0;
        }
        double t = 1.0 - u * u;
        return (15.0 / 16.0) * t * t;
    }
    }
    return 0.0;
}

SmootherConfig::SmootherConfig(ManifoldSpec manifold, double bandwidth, KernelSpec kernel)
    : manifold_(std::move(manifold)), kernel_(kernel), bandwidth_(bandwidth) {
    if (!(bandwidth_ > 0.0) || !std::isfinite(bandwidth_)) {
        throw ContractViolation("bandwidth must be positive and finite, got " + std::to_string(bandwidth_));
    }
    if (!(bandwidth_ < injectivity_radius(manifold_))) {
        throw ContractViolation("bandwidth " + std::to_string(bandwidth_) +
                                " is not below the injectivity radius of " + manifold_.describe());
    }
}

std::vector<double> raw_weights(const SmootherConfig& cfg, const ManifoldPoint& query, Sample sample) {
    std::vector<double> out(sample.size(), 0.0);
    for (std::size_t i = 0; i < sample.size(); ++i) {
        double k = kernel_eval(cfg.kernel(), distance(cfg.manifold(), query, sample[i]) / cfg.bandwidth());
        if (k == 0.0) {
            continue;
        }
        out[i] = k / volume_density(cfg.manifold(), query, sample[i]);
    }
    return out;
}

std::vector<double> normalized_weights(const SmootherConfig& cfg, const ManifoldPoint& query, Sample sample) {
    auto w = raw_weights(cfg, query, sample);
    double total = std::accumulate(w.begin(), w.end(), 0.0);
    if (!(total > 0.0)) {
        throw EmptyNeighborhood(to_string(query));
    }
    for (auto& v : w) {
        v /= total;
    }
    return w;
}

double nw_regress(const SmootherConfig& cfg, const ManifoldPoint& query, Sample sample,
                  std::span<const double> responses) {
    require_same_length(sample, responses);
    auto w = normalized_weights(cfg, query, sample);
    return weighted_sum(w, responses);
}

double density_estimate(const SmootherConfig& cfg, const ManifoldPoint& query, Sample sample) {
    if (sample.empty()) {
        return 0.0;
    }
    auto a = raw_weights(cfg, query, sample);
    double total = std::accumulate(a.begin(), a.end(), 0.0);
    double scale = static_cast<double>(sample.size()) * std::pow(cfg.bandwidth(), cfg.manifold().intrinsic_dim());
    return total / scale;
}

double loo_regress(const SmootherConfig& cfg, std::size_t i, Sample sample, std::span<const double> responses) {
    require_same_length(sample, responses);
    if (sample.size() < 2) {
        throw ContractViolation("leave-one-out smoothing needs at least two observations");
    }
    if (i >= sample.size()) {
        throw ContractViolation("leave-one-out index out of range");
    }
    auto a = raw_weights(cfg, sample[i], sample);
    a[i] = 0.0;
    double total = std::accumulate(a.begin(), a.end(), 0.0);
    if (!(total > 0.0)) {
        throw EmptyNeighborhood(to_string(sample[i]), i);
    }
    return weighted_sum(a, responses) / total;
}

DistanceTable::DistanceTable(ManifoldSpec m, std::vector<ManifoldPoint> queries, Eigen::MatrixXd distances)
    : manifold_(std::move(m)), queries_(std::move(queries)), distances_(std::move(distances)) {
    if (!std::holds_alternative<Sphere2>(manifold_.kind())) {
        return;
    }
    inverse_density_.resize(distances_.rows(), distances_.cols());
    for (Eigen::Index c = 0; c < distances_.cols(); ++c) {
        for (Eigen::Index r = 0; r < distances_.rows(); ++r) {
            double rho = distances_(r, c);
            double inv = std::numeric_limits<double>::infinity();
            if (rho < std::numbers::pi - 1e-12) {
                inv = 1.0 / sphere_density_at(rho);
            }
            inverse_density_(r, c) = inv;
        }
    }
}

DistanceTable DistanceTable::between(const ManifoldSpec& m, Sample queries, Sample sample) {
    Eigen::MatrixXd d(static_cast<Eigen::Index>(queries.size()), static_cast<Eigen::Index>(sample.size()));
    for (std::size_t c = 0; c < sample.size(); ++c) {
        for (std::size_t r = 0; r < queries.size(); ++r) {
            d(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = distance(m, queries[r], sample[c]);
        }
    }
    return DistanceTable(m, std::vector<ManifoldPoint>(queries.begin(), queries.end()), std::move(d));
}

DistanceTable DistanceTable::pairwise(const ManifoldSpec& m, Sample sample) {
    const auto n = static_cast<Eigen::Index>(sample.size());
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index c = 0; c < n; ++c) {
        for (Eigen::Index r = c + 1; r < n; ++r) {
            double v = distance(m, sample[static_cast<std::size_t>(r)], sample[static_cast<std::size_t>(c)]);
            d(r, c) = v;
            d(c, r) = v;
        }
    }
    return DistanceTable(m, std::vector<ManifoldPoint>(sample.begin(), sample.end()), std::move(d));
}

double DistanceTable::inverse_density(Eigen::Index row, Eigen::Index col) const {
    if (inverse_density_.size() == 0) {
        return 1.0;
    }
    return inverse_density_(row, col);
}

Eigen::MatrixXd smoother_matrix(const DistanceTable& table, const KernelSpec& kernel, double bandwidth,
                                bool leave_one_out) {
    // Same admissibility rule as SmootherConfig.
    SmootherConfig check(table.manifold(), bandwidth, kernel);
    if (leave_one_out && table.rows() != table.cols()) {
        throw ContractViolation("leave-one-out smoothing needs a pairwise distance table");
    }

    const double inv_h = 1.0 / bandwidth;
    Eigen::MatrixXd s(table.rows(), table.cols());
    for (Eigen::Index c = 0; c < table.cols(); ++c) {
        for (Eigen::Index r = 0; r < table.rows(); ++r) {
            double k = kernel_eval(kernel, table.distances()(r, c) * inv_h);
            if (k == 0.0 || (leave_one_out && r == c)) {
                s(r, c) = 0.0;
                continue;
            }
            double inv = table.inverse_density(r, c);
            if (!std::isfinite(inv)) {
                throw OutsideInjectivityDomain("volume density undefined at antipodal sphere points");
            }
            s(r, c) = k * inv;
        }
    }
    for (Eigen::Index r = 0; r < s.rows(); ++r) {
        double total = s.row(r).sum();
        if (!(total > 0.0)) {
            throw EmptyNeighborhood(to_string(table.query(r)), static_cast<std::size_t>(r));
        }
        s.row(r) /= total;
    }
    return s;
}

}  // namespace rplm
