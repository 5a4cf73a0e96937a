#include "rplm/geometry.hpp"

#include "rplm/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace rplm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSphereNormTolerance = 1e-6;
constexpr double kAntipodalMargin = 1e-12;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double parse_number(std::string_view text, std::string_view whole) {
    double value = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw ContractViolation("malformed manifold specification '" + std::string(whole) + "'");
    }
    return value;
}

void check_membership(const ManifoldSpec& m, const ManifoldPoint& p) {
    if (p.size() != m.coordinate_count()) {
        throw InvalidPoint("point " + to_string(p) + " does not belong to " + m.describe());
    }
}

double wrap_angle(double theta) {
    double wrapped = std::fmod(theta, kTwoPi);
    if (wrapped < 0.0) {
        wrapped += kTwoPi;
    }
    // fmod of a tiny negative number can round up to exactly 2pi
    if (wrapped >= kTwoPi) {
        wrapped = 0.0;
    }
    return wrapped;
}

}  // namespace

ManifoldSpec ManifoldSpec::euclidean(int dim) {
    if (dim < 1) {
        throw ContractViolation("euclidean dimension must be positive");
    }
    return ManifoldSpec(EuclideanSpace{dim});
}

ManifoldSpec ManifoldSpec::sphere() { return ManifoldSpec(Sphere2{}); }

ManifoldSpec ManifoldSpec::cylinder(double height_min, double height_max) {
    if (!(height_min < height_max) || !std::isfinite(height_min) || !std::isfinite(height_max)) {
        throw ContractViolation("cylinder requires finite height_min < height_max");
    }
    return ManifoldSpec(Cylinder{height_min, height_max});
}

ManifoldSpec ManifoldSpec::parse(std::string_view text) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        auto colon = text.find(':', start);
        parts.push_back(text.substr(start, colon == std::string_view::npos ? colon : colon - start));
        if (colon == std::string_view::npos) {
            break;
        }
        start = colon + 1;
    }
    if (parts[0] == "sphere" && parts.size() == 1) {
        return sphere();
    }
    if (parts[0] == "euclidean" && parts.size() == 2) {
        double d = parse_number(parts[1], text);
        if (d != std::floor(d)) {
            throw ContractViolation("euclidean dimension must be an integer");
        }
        return euclidean(static_cast<int>(d));
    }
    if (parts[0] == "cylinder" && parts.size() == 3) {
        return cylinder(parse_number(parts[1], text), parse_number(parts[2], text));
    }
    throw ContractViolation("unknown manifold '" + std::string(text) +
                            "' (expected euclidean:d, sphere or cylinder:min:max)");
}

int ManifoldSpec::intrinsic_dim() const noexcept {
    return std::visit(overloaded{[](const EuclideanSpace& e) { return e.dim; },
                                 [](const Sphere2&) { return 2; },
                                 [](const Cylinder&) { return 2; }},
                      kind_);
}

std::size_t ManifoldSpec::coordinate_count() const noexcept {
    return std::visit(overloaded{[](const EuclideanSpace& e) { return static_cast<std::size_t>(e.dim); },
                                 [](const Sphere2&) { return std::size_t{3}; },
                                 [](const Cylinder&) { return std::size_t{2}; }},
                      kind_);
}

std::string ManifoldSpec::describe() const {
    return std::visit(overloaded{[](const EuclideanSpace& e) { return "euclidean:" + std::to_string(e.dim); },
                                 [](const Sphere2&) { return std::string("sphere"); },
                                 [](const Cylinder& c) {
                                     std::ostringstream os;
                                     os.precision(17);
                                     os << "cylinder:" << c.height_min << ':' << c.height_max;
                                     return os.str();
                                 }},
                      kind_);
}

ManifoldPoint validate_point(const ManifoldSpec& m, std::span<const double> raw) {
    auto raw_string = [&] {
        std::ostringstream os;
        os.precision(17);
        os << '(';
        for (std::size_t i = 0; i < raw.size(); ++i) {
            os << (i ? "," : "") << raw[i];
        }
        os << ')';
        return os.str();
    };
    if (raw.size() != m.coordinate_count()) {
        throw InvalidPoint("expected " + std::to_string(m.coordinate_count()) + " coordinates for " +
                           m.describe() + ", got " + std::to_string(raw.size()));
    }
    if (!std::all_of(raw.begin(), raw.end(), [](double v) { return std::isfinite(v); })) {
        throw InvalidPoint("non-finite coordinate in " + raw_string());
    }

    return std::visit(
        overloaded{
            [&](const EuclideanSpace&) { return ManifoldPoint(std::vector<double>(raw.begin(), raw.end())); },
            [&](const Sphere2&) {
                double norm = std::sqrt(raw[0] * raw[0] + raw[1] * raw[1] + raw[2] * raw[2]);
                if (std::abs(norm - 1.0) > kSphereNormTolerance) {
                    throw InvalidPoint("point " + raw_string() + " is off the unit sphere (norm " +
                                       std::to_string(norm) + ")");
                }
                return ManifoldPoint({raw[0] / norm, raw[1] / norm, raw[2] / norm});
            },
            [&](const Cylinder& c) {
                double s = raw[1];
                if (s < c.height_min || s > c.height_max) {
                    throw InvalidPoint("cylinder height in " + raw_string() + " outside [" +
                                       std::to_string(c.height_min) + ", " + std::to_string(c.height_max) + "]");
                }
                return ManifoldPoint({wrap_angle(raw[0]), s});
            }},
        m.kind());
}

double distance(const ManifoldSpec& m, const ManifoldPoint& a, const ManifoldPoint& b) {
    check_membership(m, a);
    check_membership(m, b);
    return std::visit(
        overloaded{[&](const EuclideanSpace& e) {
                       double sum = 0.0;
                       for (int i = 0; i < e.dim; ++i) {
                           double diff = a[i] - b[i];
                           sum += diff * diff;
                       }
                       return std::sqrt(sum);
                   },
                   [&](const Sphere2&) {
                       // atan2(|a x b|, a.b) equals arccos(a.b) on unit vectors but keeps
                       // full precision for nearly coincident or antipodal pairs.
                       double cx = a[1] * b[2] - a[2] * b[1];
                       double cy = a[2] * b[0] - a[0] * b[2];
                       double cz = a[0] * b[1] - a[1] * b[0];
                       double dot = std::clamp(a[0] * b[0] + a[1] * b[1] + a[2] * b[2], -1.0, 1.0);
                       return std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), dot);
                   },
                   [&](const Cylinder&) {
                       double dtheta = std::abs(a[0] - b[0]);
                       dtheta = std::min(dtheta, kTwoPi - dtheta);
                       double ds = a[1] - b[1];
                       return std::sqrt(dtheta * dtheta + ds * ds);
                   }},
        m.kind());
}

double sphere_density_at(double rho) {
    if (rho >= std::numbers::pi - kAntipodalMargin) {
        throw OutsideInjectivityDomain("volume density undefined at antipodal sphere points");
    }
    if (rho == 0.0) {
        return 1.0;
    }
    return std::sin(rho) / rho;
}

double volume_density(const ManifoldSpec& m, const ManifoldPoint& base, const ManifoldPoint& target) {
    if (std::holds_alternative<Sphere2>(m.kind())) {
        return sphere_density_at(distance(m, base, target));
    }
    check_membership(m, base);
    check_membership(m, target);
    return 1.0;
}

double injectivity_radius(const ManifoldSpec& m) noexcept {
    if (std::holds_alternative<EuclideanSpace>(m.kind())) {
        return std::numeric_limits<double>::infinity();
    }
    return std::numbers::pi;
}

std::string to_string(const ManifoldPoint& p) {
    std::ostringstream os;
    os.precision(17);
    os << '(';
    for (std::size_t i = 0; i < p.size(); ++i) {
        os << (i ? "," : "") << p[i];
    }
    os << ')';
    return os.str();
}

}  // namespace rplm
