#pragma once

#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace rplm {

struct EuclideanSpace {
    int dim = 1;
    bool operator==(const EuclideanSpace&) const = default;
};

/// Unit sphere S^2 embedded in R^3.
struct Sphere2 {
    bool operator==(const Sphere2&) const = default;
};

/// Flat product S^1 (unit radius) x [height_min, height_max].
struct Cylinder {
    double height_min = 0.0;
    double height_max = 1.0;
    bool operator==(const Cylinder&) const = default;
};

/// The Riemannian manifold the nonparametric covariate lives on.
class ManifoldSpec {
public:
    using Kind = std::variant<EuclideanSpace, Sphere2, Cylinder>;

    static ManifoldSpec euclidean(int dim);
    static ManifoldSpec sphere();
    static ManifoldSpec cylinder(double height_min, double height_max);

    /// Parses `euclidean:d`, `sphere` or `cylinder:min:max`.
    static ManifoldSpec parse(std::string_view text);

    const Kind& kind() const noexcept { return kind_; }
    int intrinsic_dim() const noexcept;
    /// Number of raw coordinates in the ingestion encoding.
    std::size_t coordinate_count() const noexcept;
    std::string describe() const;

    bool operator==(const ManifoldSpec&) const = default;

private:
    explicit ManifoldSpec(Kind kind) : kind_(kind) {}
    Kind kind_;
};

/// A validated point. Euclidean: d coordinates; sphere: unit vector in R^3;
/// cylinder: (angle in [0, 2pi), height).
class ManifoldPoint {
public:
    std::span<const double> coords() const noexcept { return coords_; }
    double operator[](std::size_t i) const { return coords_[i]; }
    std::size_t size() const noexcept { return coords_.size(); }

    bool operator==(const ManifoldPoint&) const = default;

private:
    friend ManifoldPoint validate_point(const ManifoldSpec&, std::span<const double>);
    explicit ManifoldPoint(std::vector<double> coords) : coords_(std::move(coords)) {}
    std::vector<double> coords_;
};

/// Normalizes raw coordinates onto the manifold or throws InvalidPoint.
/// Sphere inputs within 1e-6 of unit norm are renormalized; cylinder angles
/// are wrapped into [0, 2pi).
ManifoldPoint validate_point(const ManifoldSpec& m, std::span<const double> raw);

inline ManifoldPoint validate_point(const ManifoldSpec& m, std::initializer_list<double> raw) {
    return validate_point(m, std::span<const double>(raw.begin(), raw.size()));
}

/// Geodesic distance.
double distance(const ManifoldSpec& m, const ManifoldPoint& a, const ManifoldPoint& b);

/// Volume density theta_base(target) in normal coordinates centred at `base`.
/// Identically 1 on flat manifolds; sin(rho)/rho on the sphere.
double volume_density(const ManifoldSpec& m, const ManifoldPoint& base, const ManifoldPoint& target);

/// Sphere density as a function of the geodesic distance alone.
double sphere_density_at(double rho);

/// +inf for Euclidean space, pi for the sphere and the unit cylinder.
double injectivity_radius(const ManifoldSpec& m) noexcept;

std::string to_string(const ManifoldPoint& p);

}  // namespace rplm
