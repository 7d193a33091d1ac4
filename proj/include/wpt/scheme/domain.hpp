#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <variant>

#include "wpt/scheme/expression.hpp"
#include "wpt/util/format.hpp"

namespace wpt::scheme {

namespace shape {
struct Box {
    Point lower{};
    Point upper{};
    friend bool operator==(const Box&, const Box&) = default;
};
struct Ball {
    Point center{};
    double radius = 1.0;
    friend bool operator==(const Ball&, const Ball&) = default;
};
struct Annulus {
    Point center{};
    double r_inner = 0.5;
    double r_outer = 1.0;
    friend bool operator==(const Annulus&, const Annulus&) = default;
};
}  // namespace shape

/// Bounded domain in 2D or 3D. Unused coordinates of points are zero.
class DomainSpec {
public:
    using Shape = std::variant<shape::Box, shape::Ball, shape::Annulus>;

    static DomainSpec box(int dim, Point lower, Point upper) {
        check_dim(dim);
        for (int i = 0; i < dim; ++i)
            if (!(upper[i] > lower[i])) throw std::invalid_argument("box: degenerate extent on axis " + std::to_string(i));
        for (int i = dim; i < 3; ++i) lower[i] = upper[i] = 0.0;
        return DomainSpec(dim, shape::Box{lower, upper});
    }
    static DomainSpec unit_cube(int dim) { return box(dim, {0, 0, 0}, {1, 1, 1}); }
    static DomainSpec ball(int dim, Point center, double radius) {
        check_dim(dim);
        if (!(radius > 0.0)) throw std::invalid_argument("ball: radius must be positive");
        for (int i = dim; i < 3; ++i) center[i] = 0.0;
        return DomainSpec(dim, shape::Ball{center, radius});
    }
    static DomainSpec annulus(int dim, Point center, double r_inner, double r_outer) {
        check_dim(dim);
        if (!(r_inner > 0.0) || !(r_inner < r_outer))
            throw std::invalid_argument("annulus: requires 0 < r_inner < r_outer");
        for (int i = dim; i < 3; ++i) center[i] = 0.0;
        return DomainSpec(dim, shape::Annulus{center, r_inner, r_outer});
    }

    int dim() const noexcept { return dim_; }
    const Shape& shape() const noexcept { return shape_; }
    template <class T>
    const T* get_if() const noexcept { return std::get_if<T>(&shape_); }

    /// Negative inside, zero on the boundary, positive outside.
    double signed_distance(const Point& x) const {
        return std::visit(
            [&](const auto& s) -> double {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, shape::Box>) {
                    double inside = std::numeric_limits<double>::infinity(), out2 = 0.0;
                    for (int i = 0; i < dim_; ++i) {
                        inside = std::min({inside, x[i] - s.lower[i], s.upper[i] - x[i]});
                        const double e = std::max({s.lower[i] - x[i], x[i] - s.upper[i], 0.0});
                        out2 += e * e;
                    }
                    return out2 > 0.0 ? std::sqrt(out2) : -inside;
                } else if constexpr (std::is_same_v<T, shape::Ball>) {
                    return radius(x, s.center) - s.radius;
                } else {
                    const double r = radius(x, s.center);
                    return std::max(s.r_inner - r, r - s.r_outer);
                }
            },
            shape_);
    }

    Point nearest_boundary_point(const Point& x) const {
        return std::visit(
            [&](const auto& s) -> Point {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, shape::Box>) {
                    Point p = x;
                    bool outside = false;
                    for (int i = 0; i < dim_; ++i) {
                        if (x[i] < s.lower[i] || x[i] > s.upper[i]) outside = true;
                        p[i] = std::clamp(x[i], s.lower[i], s.upper[i]);
                    }
                    if (outside) return p;
                    int best = 0;
                    double bd = std::numeric_limits<double>::infinity();
                    bool to_upper = false;
                    for (int i = 0; i < dim_; ++i) {
                        if (x[i] - s.lower[i] < bd) { bd = x[i] - s.lower[i]; best = i; to_upper = false; }
                        if (s.upper[i] - x[i] < bd) { bd = s.upper[i] - x[i]; best = i; to_upper = true; }
                    }
                    p[best] = to_upper ? s.upper[best] : s.lower[best];
                    return p;
                } else if constexpr (std::is_same_v<T, shape::Ball>) {
                    return project(x, s.center, s.radius);
                } else {
                    const double r = radius(x, s.center);
                    const double target = (r - s.r_inner < s.r_outer - r) ? s.r_inner : s.r_outer;
                    return project(x, s.center, target);
                }
            },
            shape_);
    }

    /// Smallest t > 0 with x + t v on the boundary, for x inside the domain;
    /// +inf if the ray never leaves (cannot happen for bounded shapes).
    double ray_exit(const Point& x, const Point& v) const {
        constexpr double inf = std::numeric_limits<double>::infinity();
        return std::visit(
            [&](const auto& s) -> double {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, shape::Box>) {
                    double t = inf;
                    for (int i = 0; i < dim_; ++i) {
                        if (v[i] > 0.0) t = std::min(t, (s.upper[i] - x[i]) / v[i]);
                        else if (v[i] < 0.0) t = std::min(t, (s.lower[i] - x[i]) / v[i]);
                    }
                    return t;
                } else if constexpr (std::is_same_v<T, shape::Ball>) {
                    return sphere_exit(x, v, s.center, s.radius);
                } else {
                    return std::min(sphere_exit(x, v, s.center, s.r_outer), sphere_entry(x, v, s.center, s.r_inner));
                }
            },
            shape_);
    }

    Point center() const {
        return std::visit(
            [&](const auto& s) -> Point {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, shape::Box>) {
                    Point c{};
                    for (int i = 0; i < dim_; ++i) c[i] = 0.5 * (s.lower[i] + s.upper[i]);
                    return c;
                } else {
                    return s.center;
                }
            },
            shape_);
    }

    double diameter() const {
        return std::visit(
            [&](const auto& s) -> double {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, shape::Box>) {
                    double d2 = 0.0;
                    for (int i = 0; i < dim_; ++i) d2 += (s.upper[i] - s.lower[i]) * (s.upper[i] - s.lower[i]);
                    return std::sqrt(d2);
                } else if constexpr (std::is_same_v<T, shape::Ball>) {
                    return 2.0 * s.radius;
                } else {
                    return 2.0 * s.r_outer;
                }
            },
            shape_);
    }

    /// Axis-aligned bounding box (lower, upper).
    std::pair<Point, Point> bounds() const {
        return std::visit(
            [&](const auto& s) -> std::pair<Point, Point> {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, shape::Box>) {
                    return {s.lower, s.upper};
                } else {
                    const double r = [&] {
                        if constexpr (std::is_same_v<T, shape::Ball>) return s.radius;
                        else return s.r_outer;
                    }();
                    Point lo{}, hi{};
                    for (int i = 0; i < dim_; ++i) {
                        lo[i] = s.center[i] - r;
                        hi[i] = s.center[i] + r;
                    }
                    return {lo, hi};
                }
            },
            shape_);
    }

    std::string to_string() const {
        auto pt = [this](const Point& p) {
            std::string s = "(";
            for (int i = 0; i < dim_; ++i) s += (i ? ", " : "") + fmt17(p[i]);
            return s + ")";
        };
        return std::visit(
            [&](const auto& s) -> std::string {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, shape::Box>) return "box" + pt(s.lower) + "-" + pt(s.upper);
                else if constexpr (std::is_same_v<T, shape::Ball>) return "ball" + pt(s.center) + " r=" + fmt17(s.radius);
                else return "annulus" + pt(s.center) + " r=[" + fmt17(s.r_inner) + ", " + fmt17(s.r_outer) + "]";
            },
            shape_);
    }

    friend bool operator==(const DomainSpec&, const DomainSpec&) = default;

private:
    DomainSpec(int dim, Shape s) : dim_(dim), shape_(s) {}
    static void check_dim(int dim) {
        if (dim != 2 && dim != 3) throw std::invalid_argument("domain dimension must be 2 or 3");
    }
    double radius(const Point& x, const Point& c) const {
        double s = 0.0;
        for (int i = 0; i < dim_; ++i) s += (x[i] - c[i]) * (x[i] - c[i]);
        return std::sqrt(s);
    }
    Point project(const Point& x, const Point& c, double r) const {
        const double rho = radius(x, c);
        Point p = c;
        if (rho == 0.0) {
            p[0] += r;
            return p;
        }
        for (int i = 0; i < dim_; ++i) p[i] = c[i] + r * (x[i] - c[i]) / rho;
        return p;
    }
    // Quadratic a t^2 + b t + c = 0 for |x + t v - center|^2 = r^2.
    void coeffs(const Point& x, const Point& v, const Point& center, double r, double& a, double& b, double& c) const {
        a = b = c = 0.0;
        for (int i = 0; i < dim_; ++i) {
            const double y = x[i] - center[i];
            a += v[i] * v[i];
            b += 2.0 * y * v[i];
            c += y * y;
        }
        c -= r * r;
    }
    // Positive root, x inside the sphere (c <= 0).
    double sphere_exit(const Point& x, const Point& v, const Point& center, double r) const {
        double a, b, c;
        coeffs(x, v, center, r, a, b, c);
        if (a == 0.0) return std::numeric_limits<double>::infinity();
        const double disc = std::sqrt(std::max(0.0, b * b - 4.0 * a * c));
        if (b <= 0.0) return (-b + disc) / (2.0 * a);
        return (-2.0 * c) / (b + disc);
    }
    // First hit of a sphere from outside (c > 0), or +inf.
    double sphere_entry(const Point& x, const Point& v, const Point& center, double r) const {
        double a, b, c;
        coeffs(x, v, center, r, a, b, c);
        const double disc2 = b * b - 4.0 * a * c;
        if (a == 0.0 || b >= 0.0 || disc2 < 0.0) return std::numeric_limits<double>::infinity();
        return (2.0 * c) / (-b + std::sqrt(disc2));
    }

    int dim_ = 2;
    Shape shape_;
};

}  // namespace wpt::scheme
