#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include "wpt/core/operator.hpp"
#include "wpt/core/sym_matrix.hpp"
#include "wpt/core/weights.hpp"

namespace wpt {

/// M_a applied to the Hessian of u(x) = v(|x|), whose eigenvalues are v''
/// (radial direction, once) and v'/r (tangential, n-1 times).
inline double radial_operator_value(const Weights& w, double vpp, double vp_over_r) {
    if (!std::isfinite(vpp) || !std::isfinite(vp_over_r))
        throw std::invalid_argument("radial_operator_value: non-finite input");
    const int n = w.n();
    SmallVector lambda(n, vp_over_r);
    lambda[0] = vpp;
    std::sort(lambda.begin(), lambda.end());
    return weighted_sum(w, lambda);
}

enum class RadialBranch { power_negative, log_negative, power_positive, log_positive, none };

inline std::string to_string(RadialBranch b) {
    switch (b) {
        case RadialBranch::power_negative: return "power_negative";
        case RadialBranch::log_negative: return "log_negative";
        case RadialBranch::power_positive: return "power_positive";
        case RadialBranch::log_positive: return "log_positive";
        case RadialBranch::none: return "none";
    }
    return "?";
}

/// One radial profile v(r) with unit multiplicative and zero additive constant:
///   power_negative  r^(-g),  g = a^_n/a_n - 1
///   log_negative    -log r
///   power_positive  r^g,     g = 1 - a^_1/a_1
///   log_positive    log r
struct RadialFunction {
    RadialBranch branch = RadialBranch::none;
    double exponent = 0.0;  // g for power branches, 0 otherwise

    double value(double r) const {
        check_radius(r);
        switch (branch) {
            case RadialBranch::power_negative: return std::pow(r, -exponent);
            case RadialBranch::log_negative: return -std::log(r);
            case RadialBranch::power_positive: return std::pow(r, exponent);
            case RadialBranch::log_positive: return std::log(r);
            case RadialBranch::none: break;
        }
        return 0.0;
    }
    double d1(double r) const {
        check_radius(r);
        switch (branch) {
            case RadialBranch::power_negative: return -exponent * std::pow(r, -exponent - 1.0);
            case RadialBranch::log_negative: return -1.0 / r;
            case RadialBranch::power_positive: return exponent * std::pow(r, exponent - 1.0);
            case RadialBranch::log_positive: return 1.0 / r;
            case RadialBranch::none: break;
        }
        return 0.0;
    }
    double d2(double r) const {
        check_radius(r);
        switch (branch) {
            case RadialBranch::power_negative: return exponent * (exponent + 1.0) * std::pow(r, -exponent - 2.0);
            case RadialBranch::log_negative: return 1.0 / (r * r);
            case RadialBranch::power_positive: return exponent * (exponent - 1.0) * std::pow(r, exponent - 2.0);
            case RadialBranch::log_positive: return -1.0 / (r * r);
            case RadialBranch::none: break;
        }
        return 0.0;
    }

private:
    static void check_radius(double r) {
        if (!(r > 0.0) || !std::isfinite(r))
            throw std::domain_error("radial profile evaluated at r <= 0");
    }
};

/// Non-constant radial solutions of M_a(D^2 u) = 0 in R^n \ {0}. When both an
/// increasing and a decreasing branch exist, the increasing one is primary.
struct RadialSolution {
    RadialFunction primary;
    std::optional<RadialFunction> secondary;

    RadialBranch branch() const noexcept { return primary.branch; }
    double exponent() const noexcept { return primary.exponent; }
};

/// Relative tolerance for the equality cases a_1 = a^_1 and a_n = a^_n.
inline constexpr double kBranchEqualityTol = 1e-12;

inline RadialSolution exact_radial_solution(const Weights& w) {
    const int n = w.n();
    const double total = w.total();
    const double a1 = w.first(), an = w.last();
    const double hat1 = w.complement(0), hatn = w.complement(n - 1);
    const double eq = kBranchEqualityTol * total;

    std::optional<RadialFunction> increasing, decreasing;
    if (std::abs(a1 - hat1) <= eq) increasing = RadialFunction{RadialBranch::log_positive, 0.0};
    else if (a1 > hat1) increasing = RadialFunction{RadialBranch::power_positive, 1.0 - hat1 / a1};

    if (std::abs(an - hatn) <= eq) decreasing = RadialFunction{RadialBranch::log_negative, 0.0};
    else if (hatn > an) decreasing = RadialFunction{RadialBranch::power_negative, hatn / an - 1.0};

    RadialSolution s;
    if (increasing) {
        s.primary = *increasing;
        s.secondary = decreasing;
    } else if (decreasing) {
        s.primary = *decreasing;
    }
    return s;
}

struct RadialEvaluation {
    double value;
    SmallVector gradient;
    SymMatrix hessian;
};

/// Value, gradient and Hessian of x -> v(|x - center|).
inline RadialEvaluation eval_radial(const RadialFunction& f, std::span<const double> x,
                                    std::span<const double> center = {}) {
    if (f.branch == RadialBranch::none) throw std::invalid_argument("eval_radial: no radial branch");
    const int n = static_cast<int>(x.size());
    SmallVector y(n);
    for (int i = 0; i < n; ++i) y[i] = x[static_cast<std::size_t>(i)] - (center.empty() ? 0.0 : center[static_cast<std::size_t>(i)]);
    const double r = y.norm();
    if (!(r > 0.0)) throw std::domain_error("eval_radial: evaluation at the singular point r = 0");
    const double v1 = f.d1(r), v2 = f.d2(r);
    RadialEvaluation e{f.value(r), SmallVector(n), SymMatrix(n)};
    for (int i = 0; i < n; ++i) e.gradient[i] = v1 * y[i] / r;
    // v'' xx^T/r^2 + (v'/r)(I - xx^T/r^2)
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const double p = y[i] * y[j] / (r * r);
            e.hessian.set(i, j, v2 * p + (v1 / r) * ((i == j ? 1.0 : 0.0) - p));
        }
    return e;
}

inline RadialEvaluation eval_radial(const RadialSolution& s, std::span<const double> x,
                                    std::span<const double> center = {}) {
    return eval_radial(s.primary, x, center);
}

}  // namespace wpt
