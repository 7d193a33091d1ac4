#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wpt/util/format.hpp"

namespace wpt {

/// Grid points always carry three coordinates; unused trailing ones are zero.
using Point = std::array<double, 3>;
using ScalarField = std::function<double(const Point&)>;

/// Built-in right-hand sides and boundary data, selected by name:
///
///   constant      [c]
///   affine        [c0, c1, c2, c3]                 c0 + sum c_i x_i
///   poly          [coef, e1, e2, e3] repeated      sum coef x^e1 y^e2 z^e3
///   log_radius    [scale, cx, cy, cz]              scale log|x - c|
///   power_radius  [gamma, scale, cx, cy, cz]       scale |x - c|^gamma
///   sin / cos     [axis, freq, amp, offset]        offset + amp sin(freq x_axis)
///
/// Trailing parameters may be omitted and default to zero (scale to one).
struct Expression {
    std::string name = "constant";
    std::vector<double> params{0.0};

    static const std::vector<std::string>& names() {
        static const std::vector<std::string> k{"constant", "affine", "poly", "log_radius",
                                                "power_radius", "sin", "cos"};
        return k;
    }

    void validate() const {
        for (double p : params)
            if (!std::isfinite(p)) throw std::invalid_argument("expression '" + name + "': non-finite parameter");
        if (name == "constant") {
            if (params.size() != 1) throw std::invalid_argument("constant takes exactly 1 parameter");
        } else if (name == "affine") {
            if (params.empty() || params.size() > 4) throw std::invalid_argument("affine takes 1 to 4 parameters");
        } else if (name == "poly") {
            if (params.size() % 4 != 0) throw std::invalid_argument("poly parameters come in groups of 4");
            for (std::size_t i = 0; i < params.size(); i += 4)
                for (std::size_t j = 1; j < 4; ++j) {
                    const double e = params[i + j];
                    if (e < 0.0 || e != std::floor(e)) throw std::invalid_argument("poly exponents must be non-negative integers");
                }
        } else if (name == "log_radius") {
            if (params.size() > 4) throw std::invalid_argument("log_radius takes at most 4 parameters");
        } else if (name == "power_radius") {
            if (params.empty() || params.size() > 5) throw std::invalid_argument("power_radius takes 1 to 5 parameters");
        } else if (name == "sin" || name == "cos") {
            if (params.empty() || params.size() > 4) throw std::invalid_argument(name + " takes 1 to 4 parameters");
            const double axis = params[0];
            if (axis < 0.0 || axis > 2.0 || axis != std::floor(axis)) throw std::invalid_argument(name + ": axis must be 0, 1 or 2");
        } else {
            throw std::invalid_argument("unknown expression '" + name + "'");
        }
    }

    double operator()(const Point& x) const {
        auto p = [this](std::size_t i, double dflt = 0.0) { return i < params.size() ? params[i] : dflt; };
        if (name == "constant") return p(0);
        if (name == "affine") return p(0) + p(1) * x[0] + p(2) * x[1] + p(3) * x[2];
        if (name == "poly") {
            double s = 0.0;
            for (std::size_t i = 0; i + 3 < params.size(); i += 4)
                s += params[i] * ipow(x[0], params[i + 1]) * ipow(x[1], params[i + 2]) * ipow(x[2], params[i + 3]);
            return s;
        }
        if (name == "log_radius") return p(0, 1.0) * std::log(dist(x, p(1), p(2), p(3)));
        if (name == "power_radius") return p(1, 1.0) * std::pow(dist(x, p(2), p(3), p(4)), p(0));
        if (name == "sin" || name == "cos") {
            const double t = p(1, 1.0) * x[static_cast<std::size_t>(p(0))];
            return p(3) + p(2, 1.0) * (name == "sin" ? std::sin(t) : std::cos(t));
        }
        throw std::invalid_argument("unknown expression '" + name + "'");
    }

    ScalarField field() const {
        validate();
        return [e = *this](const Point& x) { return e(x); };
    }

    std::string to_string() const { return name + "(" + join_doubles(params) + ")"; }

    friend bool operator==(const Expression&, const Expression&) = default;

private:
    static double ipow(double b, double e) {
        double r = 1.0;
        for (int k = 0; k < static_cast<int>(e); ++k) r *= b;
        return r;
    }
    static double dist(const Point& x, double cx, double cy, double cz) {
        return std::sqrt((x[0] - cx) * (x[0] - cx) + (x[1] - cy) * (x[1] - cy) + (x[2] - cz) * (x[2] - cz));
    }
};

}  // namespace wpt
