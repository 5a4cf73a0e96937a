#pragma once

// Textbook reference implementations used as test oracles. Nothing here
// touches the library: points are plain coordinate vectors and every
// formula is written out directly.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

namespace oracle {

using Point = std::vector<double>;
using Matrix = std::vector<std::vector<double>>;  // row major

enum class Geometry { Euclidean, Sphere, Cylinder };

inline double kernel(double u) {
    if (u < 0.0 || u >= 1.0) {
        return 0.0;
    }
    double v = 1.0 - u * u;
    return 15.0 / 16.0 * v * v;
}

inline double distance(Geometry g, const Point& a, const Point& b) {
    switch (g) {
    case Geometry::Euclidean: {
        double s = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
            s += (a[k] - b[k]) * (a[k] - b[k]);
        }
        return std::sqrt(s);
    }
    case Geometry::Sphere: {
        double dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        return std::acos(std::clamp(dot, -1.0, 1.0));
    }
    case Geometry::Cylinder: {
        double raw = std::fabs(a[0] - b[0]);
        double dtheta = std::min(raw, 2.0 * std::numbers::pi - raw);
        double ds = a[1] - b[1];
        return std::sqrt(dtheta * dtheta + ds * ds);
    }
    }
    return 0.0;
}

inline double density(Geometry g, double rho) {
    if (g != Geometry::Sphere || rho == 0.0) {
        return 1.0;
    }
    return std::sin(rho) / rho;
}

inline int dimension(Geometry g, std::size_t coords) {
    return g == Geometry::Euclidean ? static_cast<int>(coords) : 2;
}

/// Kernel weights at `query`, unnormalized.
inline std::vector<double> weights(Geometry g, const Point& query, const std::vector<Point>& pts, double h) {
    std::vector<double> w(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double rho = distance(g, query, pts[i]);
        double k = kernel(rho / h);
        w[i] = k == 0.0 ? 0.0 : k / density(g, rho);
    }
    return w;
}

/// Nadaraya-Watson estimate, empty when no point is within h.
inline std::optional<double> nw(Geometry g, const Point& query, const std::vector<Point>& pts,
                                const std::vector<double>& ys, double h) {
    auto w = weights(g, query, pts, h);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        num += w[i] * ys[i];
        den += w[i];
    }
    if (den == 0.0) {
        return std::nullopt;
    }
    return num / den;
}

/// Classical one-dimensional kernel density estimate.
inline double kde_1d(double query, const std::vector<double>& xs, double h) {
    double s = 0.0;
    for (double x : xs) {
        s += kernel(std::fabs(query - x) / h);
    }
    return s / (static_cast<double>(xs.size()) * h);
}

/// Gaussian elimination with partial pivoting; A is square.
inline std::vector<double> solve(Matrix a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) {
                piv = r;
            }
        }
        if (a[piv][c] == 0.0) {
            throw std::runtime_error("oracle: singular system");
        }
        std::swap(a[c], a[piv]);
        std::swap(b[c], b[piv]);
        for (std::size_t r = c + 1; r < n; ++r) {
            double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k) {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    std::vector<double> x(n);
    for (std::size_t r = n; r-- > 0;) {
        double s = b[r];
        for (std::size_t k = r + 1; k < n; ++k) {
            s -= a[r][k] * x[k];
        }
        x[r] = s / a[r][r];
    }
    return x;
}

/// Least squares by the normal equations; returns (coefficients, residual sum).
inline std::pair<std::vector<double>, double> least_squares(const Matrix& x, const std::vector<double>& y) {
    const std::size_t n = y.size(), p = x.empty() ? 0 : x[0].size();
    Matrix xtx(p, std::vector<double>(p, 0.0));
    std::vector<double> xty(p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < p; ++a) {
            xty[a] += x[i][a] * y[i];
            for (std::size_t b = 0; b < p; ++b) {
                xtx[a][b] += x[i][a] * x[i][b];
            }
        }
    }
    auto beta = solve(xtx, xty);
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = y[i];
        for (std::size_t a = 0; a < p; ++a) {
            r -= x[i][a] * beta[a];
        }
        rss += r * r;
    }
    return {beta, rss};
}

inline std::vector<double> column(const Matrix& x, std::size_t j) {
    std::vector<double> c(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        c[i] = x[i][j];
    }
    return c;
}

struct PlmResult {
    std::vector<double> beta;
    double sigma2 = 0.0;
    std::vector<double> g_at_sample;
};

/// Speckman-type partially linear fit with full-sample smoothing.
inline PlmResult plm(Geometry g, const std::vector<Point>& t, const Matrix& x, const std::vector<double>& y,
                     double h) {
    const std::size_t n = y.size(), p = x[0].size();
    std::vector<double> sy(n);
    Matrix sx(n, std::vector<double>(p));
    for (std::size_t i = 0; i < n; ++i) {
        sy[i] = nw(g, t[i], t, y, h).value();
        for (std::size_t j = 0; j < p; ++j) {
            sx[i][j] = nw(g, t[i], t, column(x, j), h).value();
        }
    }
    Matrix xt(n, std::vector<double>(p));
    std::vector<double> yt(n);
    for (std::size_t i = 0; i < n; ++i) {
        yt[i] = y[i] - sy[i];
        for (std::size_t j = 0; j < p; ++j) {
            xt[i][j] = x[i][j] - sx[i][j];
        }
    }
    auto [beta, rss] = least_squares(xt, yt);
    PlmResult out;
    out.beta = beta;
    out.sigma2 = rss / static_cast<double>(n - p);
    out.g_at_sample.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = sy[i];
        for (std::size_t j = 0; j < p; ++j) {
            v -= sx[i][j] * beta[j];
        }
        out.g_at_sample[i] = v;
    }
    return out;
}

/// Cross-validation by physically deleting each observation and smoothing
/// the remaining n-1; one global least squares over the centered rows.
inline std::optional<double> cv_brute_force(Geometry g, const std::vector<Point>& t, const Matrix& x,
                                            const std::vector<double>& y, double h) {
    const std::size_t n = y.size(), p = x[0].size();
    Matrix xt(n, std::vector<double>(p));
    std::vector<double> yt(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<Point> rest_t;
        std::vector<double> rest_y;
        Matrix rest_x;
        for (std::size_t k = 0; k < n; ++k) {
            if (k != i) {
                rest_t.push_back(t[k]);
                rest_y.push_back(y[k]);
                rest_x.push_back(x[k]);
            }
        }
        auto sy = nw(g, t[i], rest_t, rest_y, h);
        if (!sy) {
            return std::nullopt;
        }
        yt[i] = y[i] - *sy;
        for (std::size_t j = 0; j < p; ++j) {
            xt[i][j] = x[i][j] - nw(g, t[i], rest_t, column(rest_x, j), h).value();
        }
    }
    return least_squares(xt, yt).second;
}

/// Modified Bessel function of the first kind, integer order, by its power series.
inline double bessel_i(int order, double x) {
    double term = std::pow(x / 2.0, order) / std::tgamma(order + 1.0);
    double sum = term;
    for (int k = 1; k < 200; ++k) {
        term *= (x / 2.0) * (x / 2.0) / (static_cast<double>(k) * static_cast<double>(k + order));
        sum += term;
        if (term < 1e-17 * sum) {
            break;
        }
    }
    return sum;
}

/// Composite Simpson rule with `intervals` (even) subintervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int intervals) {
    double step = (b - a) / intervals;
    double s = f(a) + f(b);
    for (int k = 1; k < intervals; ++k) {
        s += (k % 2 ? 4.0 : 2.0) * f(a + k * step);
    }
    return s * step / 3.0;
}

inline double von_mises_density(double angle, double mean, double kappa) {
    return std::exp(kappa * std::cos(angle - mean)) / (2.0 * std::numbers::pi * bessel_i(0, kappa));
}

}  // namespace oracle
