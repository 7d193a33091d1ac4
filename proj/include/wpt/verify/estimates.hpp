#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wpt/core/operator.hpp"
#include "wpt/core/sampling.hpp"
#include "wpt/scheme/solver.hpp"
#include "wpt/scheme/stencil.hpp"
#include "wpt/verify/report.hpp"

namespace wpt::verify {

using scheme::GridFunction;
using scheme::NodeClass;
using scheme::Problem;
using scheme::Solution;

struct SolvedInstance {
    std::string id;
    Problem problem;
    Solution solution;
};

/// (sum_i |f(x_i)|^n h^n)^(1/n) over interior nodes, optionally restricted.
template <class Pred>
double discrete_ln_norm(const GridFunction& u, const ScalarField& f, Pred keep) {
    const int n = u.layout.dim;
    const double vol = u.layout.cell_volume();
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        if (u.is_interior(i) && keep(u.point(i))) s += std::pow(std::abs(f(u.point(i))), n) * vol;
    return std::pow(s, 1.0 / n);
}
inline double discrete_ln_norm(const GridFunction& u, const ScalarField& f) {
    return discrete_ln_norm(u, f, [](const Point&) { return true; });
}

inline double sup_abs(const GridFunction& u) {
    double m = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        if (u.cls[i] != NodeClass::exterior) m = std::max(m, std::abs(u.values[i]));
    return m;
}

// ---- ABP ------------------------------------------------------------------

/// lhs = sup|u| - sup_boundary |g|, rhs = d ||f||_{L^n} / a*. When f vanishes
/// the ratio is 0 if lhs stays within the solver's error bound and +inf
/// otherwise.
inline Sample abp_sample(const SolvedInstance& inst) {
    const auto& p = inst.problem;
    const auto& s = inst.solution;
    if (!s.converged) throw std::invalid_argument("abp_check: instance " + inst.id + " did not converge");
    const int n = p.domain.dim();
    const auto w = p.op.as_weights(n);
    if (!w || !classify(*w).in_a) throw std::invalid_argument("abp_check: weights must be in class A");
    const double d = p.domain.diameter();
    const double bdry = std::max(std::abs(s.data_range.first), std::abs(s.data_range.second));
    const double lhs = sup_abs(s.u) - bdry;
    const double rhs = d * discrete_ln_norm(s.u, p.f) / w->a_star();
    double ratio;
    if (rhs > 0.0) ratio = lhs / rhs;
    else ratio = lhs <= 1e-12 + s.tolerance * d * d / w->total() ? 0.0 : std::numeric_limits<double>::infinity();
    return {inst.id, lhs, rhs, ratio};
}

inline EstimateReport abp_check(const std::vector<SolvedInstance>& batch, double bound) {
    EstimateReport r{"abp"};
    r.bound = bound;
    for (const auto& inst : batch) r.add(abp_sample(inst));
    return r.finalize();
}

// ---- Harnack ----------------------------------------------------------------

/// C = sup_{Q_1/2} u / (inf_{Q_3/4} u + ||f||_{L^n(Q_1)}) on a cube Q_1, with
/// Q_s the concentric cube of s times the side.
inline Sample harnack_sample(const std::string& id, const GridFunction& u, const ScalarField& f,
                             double negative_tol = 1e-9) {
    const auto* box = u.domain.get_if<scheme::shape::Box>();
    if (!box) throw std::invalid_argument("harnack_check: domain must be a cube");
    const int n = u.layout.dim;
    const double side = box->upper[0] - box->lower[0];
    for (int a = 1; a < n; ++a)
        if (std::abs((box->upper[a] - box->lower[a]) - side) > 1e-12 * side)
            throw std::invalid_argument("harnack_check: domain must be a cube");
    const Point c = u.domain.center();
    auto in_cube = [&](const Point& x, double s) {
        for (int a = 0; a < n; ++a)
            if (std::abs(x[a] - c[a]) > 0.5 * s * side + 1e-12 * side) return false;
        return true;
    };
    double sup_half = -std::numeric_limits<double>::infinity();
    double inf_3q = std::numeric_limits<double>::infinity();
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u.cls[i] == NodeClass::exterior) continue;
        const Point x = u.point(i);
        lowest = std::min(lowest, u.values[i]);
        if (in_cube(x, 0.5)) sup_half = std::max(sup_half, u.values[i]);
        if (in_cube(x, 0.75)) inf_3q = std::min(inf_3q, u.values[i]);
    }
    if (lowest < -negative_tol) throw std::invalid_argument("harnack_check: instance " + id + " takes negative values");
    const double rhs = std::max(0.0, inf_3q) + discrete_ln_norm(u, f);
    const double lhs = sup_half;
    double ratio;
    if (rhs > 0.0) ratio = lhs / rhs;
    else ratio = lhs <= 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return {id, lhs, rhs, ratio};
}

/// Instances with negative values beyond the tolerance are rejected (noted,
/// not counted).
inline EstimateReport harnack_check(const std::vector<SolvedInstance>& batch, double cap) {
    EstimateReport r{"harnack"};
    r.bound = cap;
    for (const auto& inst : batch) {
        if (!inst.solution.converged) {
            r.notes.push_back("rejected " + inst.id + ": not converged");
            continue;
        }
        try {
            r.add(harnack_sample(inst.id, inst.solution.u, inst.problem.f, 10.0 * inst.solution.tolerance));
        } catch (const std::invalid_argument& e) {
            r.notes.push_back(std::string("rejected ") + e.what());
        }
    }
    r.finalize();
    for (const auto& s : r.samples)
        if (!std::isfinite(s.ratio)) r.pass = false;
    return r;
}

// ---- Hoelder exponent -----------------------------------------------------

struct HolderOptions {
    std::optional<Point> center;   // default: domain center
    int ray_order = 2;             // rays along lattice directions of this order
    double r_min = 0.0;            // pairs need |x - c| >= r_min
    double r_max = std::numeric_limits<double>::infinity();  // and |y - c| <= r_max
    double gamma = 0.5;            // exponent of the reported seminorm
};

struct HolderFit {
    double exponent = 0.0;
    double seminorm = 0.0;
    double gamma = 0.0;
    std::size_t pairs = 0;
    std::size_t rays = 0;
};

/// Pairs (x, y) = (c + m d h, c + 2m d h) along lattice rays from the node
/// nearest the center; the exponent is the slope of log|u(x) - u(y)| against
/// log|x - y| with one intercept per ray, which is exact for c0 + K|x - c|^alpha
/// and for affine u.
inline HolderFit holder_exponent_fit(const GridFunction& u, const HolderOptions& opt = {}) {
    const auto& L = u.layout;
    const int n = L.dim;
    const Point c = opt.center ? *opt.center : u.domain.center();
    std::array<int, 3> o{0, 0, 0};
    for (int a = 0; a < n; ++a)
        o[static_cast<std::size_t>(a)] = static_cast<int>(std::lround((c[a] - L.origin[a]) / L.spacing[a]));
    const scheme::StencilSet rays(n, opt.ray_order);

    auto node = [&](const scheme::Direction& d, int sign, int m) -> std::optional<std::size_t> {
        std::array<int, 3> e{0, 0, 0};
        for (int a = 0; a < n; ++a) {
            const auto s = static_cast<std::size_t>(a);
            e[s] = o[s] + sign * m * d[s];
            if (e[s] < 0 || e[s] >= L.dims[s]) return std::nullopt;
        }
        const std::size_t i = L.index(e[0], e[1], e[2]);
        if (u.cls[i] == NodeClass::exterior || !std::isfinite(u.values[i])) return std::nullopt;
        return i;
    };
    auto dist = [&](const Point& x) {
        double s = 0.0;
        for (int a = 0; a < n; ++a) s += (x[a] - c[a]) * (x[a] - c[a]);
        return std::sqrt(s);
    };

    HolderFit fit;
    fit.gamma = opt.gamma;
    double sxy = 0.0, sxx = 0.0;
    for (const auto& d : rays.directions())
        for (int sign : {1, -1}) {
            std::vector<std::pair<double, double>> pts;
            int reach = 0;
            for (int a = 0; a < n; ++a) reach = std::max(reach, L.dims[static_cast<std::size_t>(a)]);
            for (int m = 1; 2 * m <= reach; ++m) {
                const auto ix = node(d, sign, m);
                const auto iy = node(d, sign, 2 * m);
                if (!ix || !iy) continue;
                const Point x = u.point(*ix), y = u.point(*iy);
                if (dist(x) < opt.r_min || dist(y) > opt.r_max) continue;
                const double diff = std::abs(u.values[*iy] - u.values[*ix]);
                double sep = 0.0;
                for (int a = 0; a < n; ++a) sep += (x[a] - y[a]) * (x[a] - y[a]);
                sep = std::sqrt(sep);
                fit.seminorm = std::max(fit.seminorm, diff / std::pow(sep, opt.gamma));
                if (!(diff > 0.0)) continue;
                pts.emplace_back(std::log(sep), std::log(diff));
            }
            if (pts.size() < 2) continue;
            double mx = 0.0, my = 0.0;
            for (const auto& [x, y] : pts) {
                mx += x;
                my += y;
            }
            mx /= static_cast<double>(pts.size());
            my /= static_cast<double>(pts.size());
            for (const auto& [x, y] : pts) {
                sxy += (x - mx) * (y - my);
                sxx += (x - mx) * (x - mx);
            }
            fit.pairs += pts.size();
            ++fit.rays;
        }
    if (fit.pairs < 3 || !(sxx > 0.0)) throw std::invalid_argument("holder_exponent_fit: too few pairs");
    fit.exponent = sxy / sxx;
    return fit;
}

// ---- three circles ----------------------------------------------------------

struct CircleSample {
    double r = 0.0;
    double m = 0.0;            // max of u over nodes within h of the sphere |x - c| = r
    double interpolant = 0.0;  // chord through (log r1, M(r1)), (log r2, M(r2))
    double defect = 0.0;       // m - interpolant; <= 0 for convex M(log r)
};

inline double sphere_max(const GridFunction& u, const Point& c, double r) {
    const double h = u.layout.min_spacing();
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u.cls[i] == NodeClass::exterior) continue;
        const Point x = u.point(i);
        double s = 0.0;
        for (int a = 0; a < u.layout.dim; ++a) s += (x[a] - c[a]) * (x[a] - c[a]);
        if (std::abs(std::sqrt(s) - r) <= h) m = std::max(m, u.values[i]);
    }
    if (!std::isfinite(m)) throw std::invalid_argument("three_circles: no grid node near radius " + fmt17(r));
    return m;
}

inline std::vector<CircleSample> three_circles(const GridFunction& u, double r1, double r2,
                                               const std::vector<double>& radii) {
    const auto* ann = u.domain.get_if<scheme::shape::Annulus>();
    if (!ann) throw std::invalid_argument("three_circles: domain must be an annulus");
    const double eps = 1e-12 * ann->r_outer;
    if (!(r1 < r2) || r1 < ann->r_inner - eps || r2 > ann->r_outer + eps)
        throw std::invalid_argument("three_circles: radii outside the annulus");
    const double m1 = sphere_max(u, ann->center, r1), m2 = sphere_max(u, ann->center, r2);
    std::vector<CircleSample> out;
    for (double r : radii) {
        if (!(r > r1 && r < r2)) throw std::invalid_argument("three_circles: tested radius must lie in (r1, r2)");
        CircleSample s;
        s.r = r;
        s.m = sphere_max(u, ann->center, r);
        const double t = std::log(r / r1) / std::log(r2 / r1);
        s.interpolant = (1.0 - t) * m1 + t * m2;
        s.defect = s.m - s.interpolant;
        out.push_back(s);
    }
    return out;
}

// ---- strong maximum principle counterexample --------------------------------

struct StrongMaxReport {
    int k = 0;
    int n = 0;
    std::size_t points = 0;
    double max_abs_value = 0.0;  // max |P_k^+(D^2 u)|
    double max_u = 0.0;          // attained at an interior point
    double argmax_x1 = 0.0;
    bool pass = false;
};

namespace detail {
/// Odd m with m^n >= points, so the midpoint pi/2 is a node of the
/// per-axis grid pi (i + 1) / (m + 1).
inline int odd_axis_count(std::size_t points, int n) {
    int m = 1;
    while (std::pow(static_cast<double>(m), n) < static_cast<double>(points)) m += 2;
    return m;
}
template <class Fn>
void for_each_box_point(int n, int m, Fn&& fn) {
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    SmallVector x(n);
    while (true) {
        for (int a = 0; a < n; ++a) x[a] = std::numbers::pi * (idx[static_cast<std::size_t>(a)] + 1) / (m + 1);
        fn(x);
        int a = n - 1;
        while (a >= 0 && ++idx[static_cast<std::size_t>(a)] == m) idx[static_cast<std::size_t>(a--)] = 0;
        if (a < 0) break;
    }
}
}  // namespace detail

/// u = 1 + sin x_1 on (0, pi)^n solves P_k^+(D^2 u) = 0 for k <= n - 1 yet
/// has the interior maximum 2.
inline StrongMaxReport strong_max_counterexample(int k, int n, std::size_t points = 10000) {
    if (n < 2 || n > kMaxDim) throw std::invalid_argument("strong_max: dimension out of range");
    if (k < 1 || k > n - 1) throw std::invalid_argument("strong_max: need 1 <= k <= n - 1 (P_n^+ is the Laplacian)");
    const auto op = OperatorSpec::partial_trace(k, Sign::plus);
    const int m = detail::odd_axis_count(points, n);
    StrongMaxReport r{k, n, 0, 0.0, -std::numeric_limits<double>::infinity(), 0.0, false};
    detail::for_each_box_point(n, m, [&](const SmallVector& x) {
        SymMatrix h(n);
        h.set(0, 0, -std::sin(x[0]));
        r.max_abs_value = std::max(r.max_abs_value, std::abs(eval(op, h)));
        const double u = 1.0 + std::sin(x[0]);
        if (u > r.max_u) {
            r.max_u = u;
            r.argmax_x1 = x[0];
        }
        ++r.points;
    });
    r.pass = r.max_abs_value <= 1e-12 && std::abs(r.max_u - 2.0) <= 1e-12;
    return r;
}

/// lambda_1 + lambda_n of D^2(x1^2 + sin x2 - x3^2) = diag(2, -sin x2, -2)
/// over a grid of (0, pi)^3: identically zero.
inline double minmax_family_residual(std::size_t points = 10000) {
    const auto op = OperatorSpec::minmax(1.0, 1.0);
    double worst = 0.0;
    detail::for_each_box_point(3, detail::odd_axis_count(points, 3), [&](const SmallVector& x) {
        SymMatrix h(3);
        h.set(0, 0, 2.0);
        h.set(1, 1, -std::sin(x[1]));
        h.set(2, 2, -2.0);
        worst = std::max(worst, std::abs(eval(op, h)));
    });
    return worst;
}

// ---- operator properties ----------------------------------------------------

inline SymMatrix diag3(double a, double b, double c) { return SymMatrix::diagonal(SmallVector{a, b, c}); }

/// Fixed counterexample assertions for lambda_1 + lambda_n in 3D plus
/// randomized invariants of M_a on 3x3 and 5x5 matrices.
inline CheckReport operator_property_suite(std::uint64_t seed, long trials, double tol = 1e-9) {
    CheckReport rep{"operator-props"};
    const auto mm = OperatorSpec::minmax(1.0, 1.0);
    const SymMatrix x1 = diag3(1, 0, -1), x2 = diag3(-1, 1, 0), x3 = diag3(1, -1, -1);
    constexpr double exact = 1e-12;
    rep.row("M(X1)=0").record(std::abs(eval(mm, x1)), exact);
    rep.row("M(X2)=0").record(std::abs(eval(mm, x2)), exact);
    rep.row("M(X3)=0").record(std::abs(eval(mm, x3)), exact);
    rep.row("M(X1-X2)=1").record(std::abs(eval(mm, x1 - x2) - 1.0), exact);
    for (double t : {0.4, 0.5, 0.6})
        rep.row("M(tX1+(1-t)X2)=1-2t at " + fmt17(t)).record(std::abs(eval(mm, t * x1 + (1.0 - t) * x2) - (1.0 - 2.0 * t)), exact);
    for (int i = 1; i < 100; ++i) {
        const double t = 1.0 / 3.0 + (1.0 / 3.0) * i / 100.0;
        rep.row("t-sweep on (1/3,2/3)").record(std::abs(eval(mm, t * x1 + (1.0 - t) * x2) - (1.0 - 2.0 * t)), exact);
    }
    // X3 <= X1 with X3 != X1, yet M(X3) = M(X1): not strictly elliptic.
    const SmallVector gap = eigenvalues(x1 - x3);
    rep.row("X3<=X1, X3!=X1, M equal").record(
        std::max({-gap[0], std::abs(eval(mm, x1) - eval(mm, x3)), (x1 == x3) ? 1.0 : 0.0}), exact);
    // Neither convex nor concave: M(X1 - X2) = 1 while M(X1) = M(-X2) = 0, and
    // M is odd, so the mirrored pair breaks concavity.
    rep.row("not convex").record(eval(mm, 0.5 * (x1 - x2)) - 0.5 * (eval(mm, x1) + eval(mm, -1.0 * x2)) > 0.0 ? 0.0 : 1.0, 0.0);
    rep.row("not concave").record(
        eval(mm, 0.5 * (x2 - x1)) - 0.5 * (eval(mm, -1.0 * x1) + eval(mm, x2)) < 0.0 ? 0.0 : 1.0, 0.0);

    const CounterRng root(seed, 0x0b5);
    for (int n : {3, 5}) {
        const std::string tag = " n=" + std::to_string(n);
        for (long t = 0; t < trials; ++t) {
            CounterRng rng = root.split(static_cast<std::uint64_t>(n) * 1'000'003ULL + static_cast<std::uint64_t>(t));
            std::vector<double> a(static_cast<std::size_t>(n));
            for (auto& v : a) v = rng.uniform() < 0.3 ? 0.0 : rng.uniform(0.0, 3.0);
            a.front() = rng.uniform(0.05, 3.0);
            if (rng.uniform() < 0.5) a.back() = rng.uniform(0.05, 3.0);
            const Weights w(a);
            const auto op = OperatorSpec::weighted(w);
            const double scale = std::exp(rng.uniform(-2.0, 2.0));
            const SymMatrix x = random_symmetric(n, rng, scale);
            const SymMatrix y = random_symmetric(n, rng, scale);
            const SymMatrix p = random_psd(n, rng, 1 + static_cast<int>(rng.uniform() * n));
            const SquareMatrix q = random_orthogonal(n, rng);
            const double s = std::exp(rng.uniform(-3.0, 3.0));
            const double mx = eval(op, x);
            const SmallVector lx = eigenvalues(x), ly = eigenvalues(y), lxy = eigenvalues(x + y);
            const double tot = w.total();

            rep.row("ellipticity" + tag).record(mx - eval(op, x + p), tol);
            rep.row("homogeneity" + tag).record(std::abs(eval(op, s * x) - s * mx), tol * std::max(1.0, s));
            rep.row("rotation" + tag).record(std::abs(eval(op, x.congruence(q)) - mx), tol);
            rep.row("duality" + tag).record(std::abs(eval(dual(op), x) + eval(op, -1.0 * x)), tol);
            {
                // The sandwich needs class A; otherwise raise a_n off zero.
                std::vector<double> b = a;
                if (!(b.back() > 0.0)) b.back() = rng.uniform(0.05, 3.0);
                const Weights wa(b);
                const double ma = eval(OperatorSpec::weighted(wa), x), lam = wa.a_star() / n;
                rep.row("pucci sandwich" + tag)
                    .record(std::max(eval(OperatorSpec::pucci_minus(lam, wa.total()), x) - ma,
                                     ma - eval(OperatorSpec::pucci_plus(lam, wa.total()), x)), tol);
            }
            rep.row("|a| l1 <= M <= |a| ln" + tag).record(std::max(tot * lx[0] - mx, mx - tot * lx[n - 1]), tol);
            rep.row("l1 inequalities" + tag)
                .record(std::max(lx[0] + ly[0] - lxy[0], lxy[0] - lx[0] - ly[n - 1]), tol);
            rep.row("ln inequalities" + tag)
                .record(std::max(lx[0] + ly[n - 1] - lxy[n - 1], lxy[n - 1] - lx[n - 1] - ly[n - 1]), tol);
        }
    }
    return rep;
}

}  // namespace wpt::verify
