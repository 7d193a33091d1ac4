#include <gtest/gtest.h>

#include <cmath>

#include "wpt/core/sampling.hpp"
#include "wpt/scheme/discrete_operator.hpp"
#include "wpt/scheme/grid.hpp"
#include "wpt/util/rng.hpp"

using namespace wpt;
using namespace wpt::scheme;

namespace {

// u(x) = x^T A x / 2 + b.x, for which every central or unequal-step second
// difference along d equals d^T A d / |d|^2 exactly.
struct Quadratic {
    SymMatrix a;
    Point b{0.3, -0.2, 0.1};
    double operator()(const Point& x) const {
        double s = 0.0;
        for (int i = 0; i < a.dim(); ++i) {
            s += b[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
            for (int j = 0; j < a.dim(); ++j) s += 0.5 * a(i, j) * x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(j)];
        }
        return s;
    }
};

GridFunction sample(const DomainSpec& d, double h, const ScalarField& f) {
    GridFunction u = build_grid(d, h);
    for (std::size_t i = 0; i < u.size(); ++i)
        if (u.cls[i] != NodeClass::exterior) u.values[i] = f(u.point(i));
    return u;
}

double directional_min_max(const SymMatrix& a, const StencilSet& st, bool want_max) {
    double best = want_max ? -INFINITY : INFINITY;
    for (const auto& d : st.directions()) {
        SmallVector v(a.dim());
        for (int i = 0; i < a.dim(); ++i) v[i] = d[static_cast<std::size_t>(i)];
        const double q = a.quad(v) / v.dot(v);
        best = want_max ? std::max(best, q) : std::min(best, q);
    }
    return best;
}

}  // namespace

TEST(SecondDifference, UnequalStepFormula) {
    // f = x^2 at 0 with arms 0.1 and 0.3: exact for quadratics.
    EXPECT_NEAR(unequal_second_difference(0.0, 0.01, 0.1, 0.09, 0.3), 2.0, 1e-12);
    EXPECT_NEAR(unequal_second_difference(1.0, 2.0, 0.5, 2.0, 0.5), 8.0, 1e-12);
}

TEST(SecondDifference, ExactOnQuadraticsWithClippedArms) {
    CounterRng rng(8);
    for (const auto& dom : {DomainSpec::ball(2, {0, 0, 0}, 1.0), DomainSpec::annulus(3, {0, 0, 0}, 0.5, 1.0)}) {
        const int n = dom.dim();
        const Quadratic q{random_symmetric(n, rng)};
        const auto u = sample(dom, 0.125, q);
        const StencilSet st(n, 2);
        std::size_t clipped_nodes = 0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            if (!u.is_interior(i)) continue;
            bool any_clipped = false;
            for (const auto& d : st.directions()) {
                SmallVector v(n);
                for (int k = 0; k < n; ++k) v[k] = d[static_cast<std::size_t>(k)];
                const double expect = q.a.quad(v) / (v.dot(v) * 0.125 * 0.125) * 0.125 * 0.125;
                EXPECT_NEAR(second_difference(u, i, d, q) * v.dot(v), expect * v.dot(v), 1e-9);
                any_clipped = any_clipped || resolve_arm(u, i, d, 1, q).clipped || resolve_arm(u, i, d, -1, q).clipped;
            }
            clipped_nodes += any_clipped;
        }
        EXPECT_GT(clipped_nodes, 0u);
    }
}

TEST(DiscreteOperator, SpectralIsExactOnQuadratics) {
    CounterRng rng(9);
    const auto dom = DomainSpec::ball(3, {0, 0, 0}, 1.0);
    for (const auto& op : {OperatorSpec::weighted(Weights{3, 1, 1}), OperatorSpec::pucci_plus(0.5, 2.0),
                           OperatorSpec::minmax(1, 1), OperatorSpec::partial_trace(2, Sign::minus)}) {
        const Quadratic q{random_symmetric(3, rng)};
        const auto u = sample(dom, 0.125, q);
        const DiscreteOperator dop(u, op, Backend::spectral, 1, q);
        const double expect = eval(op, q.a);
        for (std::size_t k = 0; k < dop.interior().size(); ++k)
            EXPECT_NEAR(dop.apply(k, u.values.data()), expect, 1e-9) << op.to_string();
    }
}

TEST(DiscreteOperator, MonotoneMinMaxIsDirectionalExtremes) {
    CounterRng rng(10);
    const auto dom = DomainSpec::ball(2, {0, 0, 0}, 1.0);
    for (int p = 1; p <= 3; ++p) {
        const Quadratic q{random_symmetric(2, rng)};
        const auto u = sample(dom, 1.0 / 16.0, q);
        const StencilSet st(2, p);
        const DiscreteOperator dop(u, OperatorSpec::minmax(2.0, 0.5), Backend::monotone, p, q);
        const double expect = 2.0 * directional_min_max(q.a, st, false) + 0.5 * directional_min_max(q.a, st, true);
        for (std::size_t k = 0; k < dop.interior().size(); ++k) EXPECT_NEAR(dop.apply(k, u.values.data()), expect, 1e-8);
    }
}

TEST(DiscreteOperator, DiagonalQuadraticIsExactForMonotone) {
    // Eigenvectors along the axes belong to every stencil.
    const Quadratic q{SymMatrix::diagonal(SmallVector{2.0, -1.0, 0.5})};
    const auto u = sample(DomainSpec::unit_cube(3), 0.125, q);
    for (const auto& op : {OperatorSpec::minmax(1, 1), OperatorSpec::weighted(Weights{2, 0, 1}),
                           OperatorSpec::partial_trace(2, Sign::plus), OperatorSpec::weighted(Weights::laplacian(3))}) {
        const DiscreteOperator dop(u, op, Backend::monotone, 1, q);
        for (std::size_t k = 0; k < dop.interior().size(); ++k)
            EXPECT_NEAR(dop.apply(k, u.values.data()), eval(op, q.a), 1e-9) << op.to_string();
    }
}

TEST(DiscreteOperator, SingleNodeMatchesPrecomputed) {
    CounterRng rng(12);
    const auto dom = DomainSpec::annulus(2, {0, 0, 0}, 0.5, 1.0);
    const Expression g{"sin", {0, 3.0}};
    GridFunction u = build_grid(dom, 1.0 / 16.0);
    for (std::size_t i = 0; i < u.size(); ++i)
        if (u.cls[i] != NodeClass::exterior) u.values[i] = rng.normal();
    assign_boundary(u, g.field());
    for (const auto backend : {Backend::monotone, Backend::spectral}) {
        const auto op = OperatorSpec::minmax(1.0, 2.0);
        const DiscreteOperator dop(u, op, backend, 2, g.field());
        const StencilSet st(2, 2);
        for (std::size_t k = 0; k < dop.interior().size(); k += 7)
            EXPECT_NEAR(dop.apply(k, u.values.data()), discrete_operator(op, u, dop.interior()[k], st, backend, g.field()),
                        1e-9 * (1 + std::abs(dop.apply(k, u.values.data()))));
    }
}

TEST(DiscreteOperator, MonotoneInNeighborsAntitoneInCenter) {
    CounterRng rng(13);
    for (const auto& op : {OperatorSpec::minmax(1, 1), OperatorSpec::weighted(Weights{2, 0, 1}),
                           OperatorSpec::partial_trace(2, Sign::minus)}) {
        const auto dom = DomainSpec::ball(3, {0, 0, 0}, 1.0);
        const Expression g{"cos", {2, 2.0}};
        GridFunction u = build_grid(dom, 0.125);
        for (std::size_t i = 0; i < u.size(); ++i)
            if (u.cls[i] != NodeClass::exterior) u.values[i] = rng.normal();
        assign_boundary(u, g.field());
        const DiscreteOperator dop(u, op, Backend::monotone, 2, g.field());
        const auto& nodes = dop.interior();
        for (int t = 0; t < 300; ++t) {
            const std::size_t q = static_cast<std::size_t>(rng.uniform() * nodes.size());
            const double base = dop.apply(q, u.values.data());
            std::vector<double> w = u.values;
            // Raise a random other interior node.
            const std::size_t other = nodes[static_cast<std::size_t>(rng.uniform() * nodes.size())];
            if (other != nodes[q]) {
                w[other] += rng.uniform(0.0, 2.0);
                EXPECT_GE(dop.apply(q, w.data()), base - 1e-12);
            }
            w = u.values;
            w[nodes[q]] += rng.uniform(0.0, 2.0);
            EXPECT_LE(dop.apply(q, w.data()), base + 1e-12);
        }
    }
}

TEST(DiscreteOperator, RejectsUnsupportedCombinations) {
    const auto u = build_grid(DomainSpec::unit_cube(3), 0.25);
    const ScalarField g = [](const Point&) { return 0.0; };
    EXPECT_THROW(DiscreteOperator(u, OperatorSpec::pucci_plus(1, 2), Backend::monotone, 1, g), std::invalid_argument);
    EXPECT_THROW(DiscreteOperator(u, OperatorSpec::weighted(Weights{3, 1, 1}), Backend::monotone, 1, g),
                 std::invalid_argument);
    EXPECT_THROW(DiscreteOperator(u, OperatorSpec::weighted(Weights{1, 1}), Backend::spectral, 1, g), std::invalid_argument);
    EXPECT_NO_THROW(DiscreteOperator(u, OperatorSpec::weighted(Weights{3, 1, 1}), Backend::spectral, 1, g));
}

TEST(DiscreteOperator, EnteringDirections) {
    const auto u = build_grid(DomainSpec::unit_cube(3), 0.25);
    const ScalarField g = [](const Point&) { return 0.0; };
    EXPECT_EQ(DiscreteOperator(u, OperatorSpec::minmax(1, 1), Backend::monotone, 1, g).entering_directions(), 2);
    EXPECT_EQ(DiscreteOperator(u, OperatorSpec::partial_trace(2, Sign::plus), Backend::monotone, 1, g).entering_directions(), 2);
    EXPECT_EQ(DiscreteOperator(u, OperatorSpec::minmax(1, 1), Backend::spectral, 1, g).entering_directions(), 12);
}

TEST(DiscreteOperator, HessianEigenvaluesMatchJacobi) {
    CounterRng rng(14);
    for (int t = 0; t < 500; ++t) {
        const SymMatrix x = random_symmetric(2 + t % 2, rng, 5.0);
        const auto a = detail::hessian_eigenvalues(x), b = eigenvalues(x);
        for (int i = 0; i < x.dim(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12 * (1 + std::abs(b[i])));
    }
}
