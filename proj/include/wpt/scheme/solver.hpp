#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wpt/core/operator.hpp"
#include "wpt/scheme/discrete_operator.hpp"
#include "wpt/scheme/grid.hpp"
#include "wpt/util/format.hpp"
#include "wpt/util/parallel.hpp"

namespace wpt::scheme {

enum class Sweep { jacobi, gauss_seidel };
enum class InitialGuess { boundary_extension, zero };

inline std::string to_string(Sweep s) { return s == Sweep::jacobi ? "jacobi" : "gauss_seidel"; }
inline Sweep parse_sweep(const std::string& s) {
    if (s == "jacobi") return Sweep::jacobi;
    if (s == "gauss_seidel") return Sweep::gauss_seidel;
    throw std::invalid_argument("unknown sweep '" + s + "' (expected jacobi or gauss_seidel)");
}
inline std::string to_string(InitialGuess g) { return g == InitialGuess::zero ? "zero" : "boundary"; }
inline InitialGuess parse_initial_guess(const std::string& s) {
    if (s == "boundary") return InitialGuess::boundary_extension;
    if (s == "zero") return InitialGuess::zero;
    throw std::invalid_argument("unknown initial guess '" + s + "' (expected boundary or zero)");
}

/// Dirichlet problem F(D^2 u) = f in the domain, u = g on its boundary.
struct Problem {
    DomainSpec domain;
    OperatorSpec op;
    ScalarField f;
    ScalarField g;
    Backend backend = Backend::monotone;
    double h = 0.05;
    int order = 1;                     // stencil order p (monotone backend)
    std::optional<double> tolerance;   // default 1e-8 in 2D, 1e-6 in 3D
    long max_iterations = 1'000'000;
    std::optional<double> damping;     // override for tau
    Sweep sweep = Sweep::jacobi;
    int threads = 1;
    InitialGuess init = InitialGuess::boundary_extension;

    double effective_tolerance() const { return tolerance ? *tolerance : (domain.dim() == 2 ? 1e-8 : 1e-6); }
};

struct Solution {
    GridFunction u;
    std::vector<double> residual_history;  // sup-norm of F_h[u] - f before each update
    long iterations = 0;
    bool converged = false;
    double damping = 0.0;
    double tolerance = 0.0;
    std::pair<double, double> data_range{0.0, 0.0};  // min/max of all Dirichlet values read
    std::vector<std::string> warnings;

    double final_residual() const { return residual_history.empty() ? 0.0 : residual_history.back(); }
};

/// tau = h_min^2 / (2 |a| D) with h_min^2 the smallest arm product in use.
inline double default_damping(const DiscreteOperator& dop, int dim) {
    return dop.min_arm_product() / (2.0 * dop.op().scale(dim) * dop.entering_directions());
}

/// Damped fixed-point iteration u <- u + tau (F_h[u] - f) on interior nodes.
/// Jacobi sweeps read the previous buffer only, so the result does not depend
/// on the thread count. Gauss-Seidel updates in place in lexicographic order.
inline constexpr double kDivergenceFactor = 1e8;

inline void check_growth(const Solution& s, double res) {
    // Blow-up stays finite for a long time; stop once the residual has grown
    // far beyond where it started.
    const double first = s.residual_history.empty() ? res : s.residual_history.front();
    if (res > kDivergenceFactor * std::max(first, 1.0))
        throw std::runtime_error("solve: residual diverged (" + fmt17(res) + " at iteration " + std::to_string(s.iterations) +
                                 "); reduce the damping");
}

inline Solution solve(const Problem& p) {
    if (!p.f || !p.g) throw std::invalid_argument("solve: f and g must be set");
    if (!(p.max_iterations >= 1)) throw std::invalid_argument("solve: max_iterations must be >= 1");
    const double tol = p.effective_tolerance();
    if (!(tol > 0.0)) throw std::invalid_argument("solve: tolerance must be positive");

    Solution s{build_grid(p.domain, p.h), {}, 0, false, 0.0, tol, {}, {}};
    GridFunction& u = s.u;
    assign_boundary(u, p.g);
    const DiscreteOperator dop(u, p.op, p.backend, p.order, p.g);
    const int dim = p.domain.dim();

    const double tau0 = default_damping(dop, dim);
    double tau = tau0;
    if (p.damping) {
        if (!(*p.damping > 0.0)) throw std::invalid_argument("solve: damping must be positive");
        tau = *p.damping;
        if (tau > 4.0 * tau0) {
            tau = 4.0 * tau0;
            s.warnings.push_back("damping " + fmt17(*p.damping) + " clamped to " + fmt17(tau) +
                                 " (4x the stability bound)");
        }
    }
    s.damping = tau;

    const auto& nodes = dop.interior();
    std::vector<double> f(nodes.size());
    for (std::size_t q = 0; q < nodes.size(); ++q) {
        f[q] = p.f(u.point(nodes[q]));
        if (!std::isfinite(f[q])) throw std::invalid_argument("right-hand side is not finite at an interior node");
    }

    // Warm start: g extended inside and clamped to the range of the boundary
    // data, so every iterate starts within the discrete maximum principle.
    const auto [lo, hi] = dop.boundary_range();
    s.data_range = {lo, hi};
    for (std::size_t i : nodes) {
        double v = 0.0;
        if (p.init == InitialGuess::boundary_extension) {
            v = p.g(u.point(i));
            v = std::isfinite(v) ? std::clamp(v, lo, hi) : 0.5 * (lo + hi);
        }
        u.values[i] = v;
    }

    if (p.sweep == Sweep::jacobi) {
        std::vector<double> next = u.values;
        const int threads = std::max(1, p.threads);
        std::vector<double> chunk_max(static_cast<std::size_t>(threads));
        std::vector<char> chunk_nan(static_cast<std::size_t>(threads));
        while (s.iterations < p.max_iterations) {
            ++s.iterations;
            std::fill(chunk_max.begin(), chunk_max.end(), 0.0);
            std::fill(chunk_nan.begin(), chunk_nan.end(), 0);
            const double* cur = u.values.data();
            parallel_for_chunks(nodes.size(), threads, [&](std::size_t b, std::size_t e, std::size_t c) {
                double m = 0.0;
                bool bad = false;
                for (std::size_t q = b; q < e; ++q) {
                    double r;
                    try {
                        r = dop.apply(q, cur) - f[q];
                    } catch (const std::invalid_argument&) {  // non-finite Hessian entries
                        r = std::numeric_limits<double>::quiet_NaN();
                    }
                    if (std::isnan(r)) bad = true;
                    m = std::max(m, std::abs(r));
                    next[nodes[q]] = cur[nodes[q]] + tau * r;
                }
                chunk_max[c] = m;
                chunk_nan[c] = bad;
            });
            const double res = *std::max_element(chunk_max.begin(), chunk_max.end());
            if (std::find(chunk_nan.begin(), chunk_nan.end(), 1) != chunk_nan.end() || !std::isfinite(res))
                throw std::runtime_error("solve: NaN or overflow in the residual at iteration " + std::to_string(s.iterations));
            check_growth(s, res);
            s.residual_history.push_back(res);
            if (res <= tol) {
                s.converged = true;
                break;
            }
            u.values.swap(next);
        }
    } else {
        if (p.threads > 1) s.warnings.push_back("gauss_seidel sweeps run single-threaded");
        double* cur = u.values.data();
        while (s.iterations < p.max_iterations) {
            ++s.iterations;
            double res = 0.0;
            for (std::size_t q = 0; q < nodes.size(); ++q) {
                double r;
                try {
                    r = dop.apply(q, cur) - f[q];
                } catch (const std::invalid_argument&) {
                    r = std::numeric_limits<double>::quiet_NaN();
                }
                if (!std::isfinite(r)) throw std::runtime_error("solve: NaN or overflow in the residual at iteration " + std::to_string(s.iterations));
                res = std::max(res, std::abs(r));
                cur[nodes[q]] += tau * r;
            }
            check_growth(s, res);
            s.residual_history.push_back(res);
            if (res <= tol) {
                // In-place sweeps see a moving target; confirm at the final state.
                double check = 0.0;
                for (std::size_t q = 0; q < nodes.size(); ++q) check = std::max(check, std::abs(dop.apply(q, cur) - f[q]));
                if (check <= tol) {
                    s.converged = true;
                    break;
                }
            }
        }
    }
    return s;
}

/// Sup-norm of F_h[u] - f over interior nodes, for an externally produced u.
inline double residual_norm(const Problem& p, const GridFunction& u) {
    const DiscreteOperator dop(u, p.op, p.backend, p.order, p.g);
    double r = 0.0;
    for (std::size_t q = 0; q < dop.interior().size(); ++q)
        r = std::max(r, std::abs(dop.apply(q, u.values.data()) - p.f(u.point(dop.interior()[q]))));
    return r;
}

inline std::string residual_csv(const Solution& s) {
    std::ostringstream o;
    o << "iter,residual\n";
    for (std::size_t i = 0; i < s.residual_history.size(); ++i) o << (i + 1) << ',' << fmt17(s.residual_history[i]) << '\n';
    return o.str();
}

}  // namespace wpt::scheme
