#pragma once

#include "oracles.hpp"

#include "rplm/geometry.hpp"
#include "rplm/plm.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace testing {

inline rplm::ManifoldSpec spec_for(oracle::Geometry g, int euclidean_dim = 1) {
    switch (g) {
    case oracle::Geometry::Euclidean: return rplm::ManifoldSpec::euclidean(euclidean_dim);
    case oracle::Geometry::Sphere: return rplm::ManifoldSpec::sphere();
    case oracle::Geometry::Cylinder: return rplm::ManifoldSpec::cylinder(-2.0, 2.0);
    }
    return rplm::ManifoldSpec::sphere();
}

inline std::vector<double> raw_point(oracle::Geometry g, std::mt19937_64& rng, int euclidean_dim = 1) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    switch (g) {
    case oracle::Geometry::Euclidean: {
        std::vector<double> p(static_cast<std::size_t>(euclidean_dim));
        for (auto& v : p) {
            v = 3.0 * unit(rng);
        }
        return p;
    }
    case oracle::Geometry::Sphere: {
        double a = normal(rng), b = normal(rng), c = normal(rng);
        double r = std::sqrt(a * a + b * b + c * c);
        return {a / r, b / r, c / r};
    }
    case oracle::Geometry::Cylinder: return {2.0 * std::numbers::pi * unit(rng), 4.0 * unit(rng) - 2.0};
    }
    return {};
}

inline std::vector<rplm::ManifoldPoint> random_points(oracle::Geometry g, std::size_t n, std::mt19937_64& rng,
                                                      int euclidean_dim = 1) {
    auto m = spec_for(g, euclidean_dim);
    std::vector<rplm::ManifoldPoint> out;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(rplm::validate_point(m, raw_point(g, rng, euclidean_dim)));
    }
    return out;
}

inline oracle::Point to_oracle(const rplm::ManifoldPoint& p) { return {p.coords().begin(), p.coords().end()}; }

inline std::vector<oracle::Point> to_oracle(const std::vector<rplm::ManifoldPoint>& ps) {
    std::vector<oracle::Point> out;
    for (const auto& p : ps) {
        out.push_back(to_oracle(p));
    }
    return out;
}

inline oracle::Matrix to_oracle(const Eigen::MatrixXd& x) {
    oracle::Matrix out(static_cast<std::size_t>(x.rows()), std::vector<double>(static_cast<std::size_t>(x.cols())));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = x(i, j);
        }
    }
    return out;
}

inline std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

/// y = x beta + g(t) + noise with a smooth g built from the first coordinate.
inline rplm::Dataset random_dataset(oracle::Geometry g, std::size_t n, std::size_t p, std::mt19937_64& rng,
                                    double noise_sd = 0.3, int euclidean_dim = 1) {
    std::normal_distribution<double> normal(0.0, 1.0);
    auto t = random_points(g, n, rng, euclidean_dim);
    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        auto r = static_cast<Eigen::Index>(i);
        double signal = std::sin(2.0 * t[i][0]);
        for (std::size_t j = 0; j < p; ++j) {
            x(r, static_cast<Eigen::Index>(j)) = normal(rng) + 0.5 * t[i][0];
            signal += (1.0 + static_cast<double>(j)) * x(r, static_cast<Eigen::Index>(j));
        }
        y(r) = signal + noise_sd * normal(rng);
    }
    return rplm::Dataset(spec_for(g, euclidean_dim), std::move(y), std::move(x), std::move(t));
}

inline constexpr oracle::Geometry kAllGeometries[] = {oracle::Geometry::Euclidean, oracle::Geometry::Sphere,
                                                      oracle::Geometry::Cylinder};

}  // namespace testing
