#include <gtest/gtest.h>

#include <cmath>

#include "wpt/core/sampling.hpp"
#include "wpt/scheme/convergence.hpp"
#include "wpt/scheme/expression.hpp"
#include "wpt/scheme/solver.hpp"
#include "wpt/util/rng.hpp"

using namespace wpt;
using namespace wpt::scheme;

namespace {

ScalarField constant(double c) {
    return [c](const Point&) { return c; };
}

Problem base(const DomainSpec& d, const OperatorSpec& op, ScalarField f, ScalarField g, Backend b = Backend::monotone) {
    Problem p{.domain = d, .op = op, .f = std::move(f), .g = std::move(g), .backend = b, .h = 0.125};
    p.tolerance = 1e-10;
    return p;
}

double max_diff(const GridFunction& a, const GridFunction& b, double scale_b = 1.0) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a.cls[i] != NodeClass::exterior) m = std::max(m, std::abs(a.values[i] - scale_b * b.values[i]));
    return m;
}

}  // namespace

TEST(Solve, ConstantDataIsAFixedPoint) {
    const auto p = base(DomainSpec::ball(2, {0, 0, 0}, 1.0), OperatorSpec::minmax(1, 1), constant(0.0), constant(2.5));
    const auto s = solve(p);
    EXPECT_TRUE(s.converged);
    EXPECT_EQ(s.iterations, 1);
    for (std::size_t i = 0; i < s.u.size(); ++i)
        if (s.u.cls[i] != NodeClass::exterior) { EXPECT_EQ(s.u.values[i], 2.5); }
}

TEST(Solve, AffineDataIsReproduced) {
    const Expression g{"affine", {0.2, 1.0, -0.5, 0.3}};
    for (const auto& d : {DomainSpec::annulus(2, {0, 0, 0}, 0.5, 1.0), DomainSpec::ball(3, {0, 0, 0}, 1.0)})
        for (const auto b : {Backend::monotone, Backend::spectral}) {
            auto p = base(d, OperatorSpec::minmax(1, 2), constant(0.0), g.field(), b);
            p.init = InitialGuess::zero;
            if (d.dim() == 3) p.h = 0.25;
            const auto s = solve(p);
            ASSERT_TRUE(s.converged);
            EXPECT_LE(max_interior_error(s.u, g.field()), 1e-9);
        }
}

TEST(Solve, QuadraticIsTheDiscreteSolutionForSpectral) {
    CounterRng rng(21);
    const SymMatrix a = random_symmetric(3, rng);
    auto q = [a](const Point& x) {
        double s = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) s += 0.5 * a(i, j) * x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(j)];
        return s;
    };
    const auto op = OperatorSpec::weighted(Weights{3, 1, 1});
    auto p = base(DomainSpec::ball(3, {0, 0, 0}, 1.0), op, constant(eval(op, a)), q, Backend::spectral);
    const auto s = solve(p);
    ASSERT_TRUE(s.converged);
    EXPECT_LE(max_interior_error(s.u, q), 1e-8);
}

TEST(Solve, ComparisonPrinciple) {
    CounterRng rng(22);
    const auto dom = DomainSpec::annulus(2, {0, 0, 0}, 0.5, 1.0);
    for (const auto& op : {OperatorSpec::minmax(1, 1), OperatorSpec::weighted(Weights{2, 1}), OperatorSpec::partial_trace(1, Sign::plus)}) {
        const Expression g1{"sin", {0, 2.0, 1.0, rng.uniform()}};
        const double lift = rng.uniform(0.0, 0.3), push = rng.uniform(0.0, 2.0);
        const Expression f1{"cos", {1, 3.0, 1.0, 0.0}};
        auto p1 = base(dom, op, f1.field(), g1.field());
        auto p2 = base(dom, op, [&](const Point& x) { return f1(x) - push; }, [&](const Point& x) { return g1(x) + lift; });
        const auto s1 = solve(p1), s2 = solve(p2);
        ASSERT_TRUE(s1.converged && s2.converged);
        for (std::size_t i = 0; i < s1.u.size(); ++i)
            if (s1.u.cls[i] != NodeClass::exterior) { EXPECT_LE(s1.u.values[i], s2.u.values[i] + 1e-8); }
    }
}

TEST(Solve, WeakMaximumPrincipleAndUniformEstimate) {
    const auto dom = DomainSpec::ball(3, {0, 0, 0}, 1.0);
    const Expression g{"cos", {0, 3.0, 1.0, 0.5}};
    const auto op = OperatorSpec::weighted(Weights{2, 0, 1});
    auto p = base(dom, op, constant(0.0), g.field());
    p.tolerance = 1e-9;
    auto s = solve(p);
    ASSERT_TRUE(s.converged);
    double umax = -INFINITY;
    for (std::size_t i = 0; i < s.u.size(); ++i)
        if (s.u.is_interior(i)) umax = std::max(umax, s.u.values[i]);
    EXPECT_LE(umax, s.data_range.second + 1e-9);

    // f <= 0 somewhere: u <= max g+ + d^2 sup f^- / |a|.
    p.f = [](const Point& x) { return -1.0 - x[0]; };
    s = solve(p);
    ASSERT_TRUE(s.converged);
    const double d = dom.diameter(), bound = std::max(0.0, s.data_range.second) + d * d * 2.0 / 3.0;
    for (std::size_t i = 0; i < s.u.size(); ++i)
        if (s.u.is_interior(i)) { EXPECT_LE(s.u.values[i], bound + 1e-8); }
}

TEST(Solve, SolutionMapIsPositivelyHomogeneous) {
    const auto dom = DomainSpec::annulus(2, {0, 0, 0}, 0.5, 1.0);
    const Expression g{"sin", {1, 2.0}}, f{"affine", {1.0, 2.0, 0.0}};
    const auto op = OperatorSpec::minmax(2, 1);
    const auto s1 = solve(base(dom, op, f.field(), g.field()));
    const auto s3 = solve(base(dom, op, [&](const Point& x) { return 3.0 * f(x); }, [&](const Point& x) { return 3.0 * g(x); }));
    EXPECT_LE(max_diff(s3.u, s1.u, 3.0), 1e-7);
}

TEST(Solve, DualOperatorNegatesTheSolution) {
    const auto dom = DomainSpec::ball(2, {0, 0, 0}, 1.0);
    const Expression g{"cos", {1, 2.0}}, f{"affine", {0.5, -1.0, 1.0}};
    const auto op = OperatorSpec::minmax(2, 1);
    const auto s = solve(base(dom, op, f.field(), g.field()));
    const auto t = solve(base(dom, dual(op), [&](const Point& x) { return -f(x); }, [&](const Point& x) { return -g(x); }));
    EXPECT_LE(max_diff(t.u, s.u, -1.0), 1e-7);
}

TEST(Solve, JacobiIsBitIdenticalAcrossThreadCounts) {
    const Expression g{"sin", {0, 3.0}};
    auto p = base(DomainSpec::annulus(3, {0, 0, 0}, 0.5, 1.0), OperatorSpec::minmax(1, 1), constant(0.3), g.field());
    p.tolerance = 1e-6;
    p.threads = 1;
    const auto a = solve(p);
    p.threads = 3;
    const auto b = solve(p);
    EXPECT_EQ(a.iterations, b.iterations);
    EXPECT_EQ(a.residual_history, b.residual_history);
    for (std::size_t i = 0; i < a.u.size(); ++i)
        if (a.u.cls[i] != NodeClass::exterior) { EXPECT_EQ(a.u.values[i], b.u.values[i]); }
}

TEST(Solve, GaussSeidelAgreesWithJacobi) {
    const Expression g{"sin", {0, 3.0}};
    auto p = base(DomainSpec::ball(2, {0, 0, 0}, 1.0), OperatorSpec::minmax(1, 1), constant(0.0), g.field());
    const auto j = solve(p);
    p.sweep = Sweep::gauss_seidel;
    const auto gs = solve(p);
    ASSERT_TRUE(j.converged && gs.converged);
    EXPECT_LE(max_diff(j.u, gs.u), 1e-8);
}

TEST(Solve, DampingOverrideIsClampedWithAWarning) {
    auto p = base(DomainSpec::unit_cube(2), OperatorSpec::minmax(1, 1), constant(0.0), constant(1.0));
    const auto ref = solve(p);
    p.damping = 100.0 * ref.damping;
    const auto s = solve(p);
    EXPECT_DOUBLE_EQ(s.damping, 4.0 * ref.damping);
    ASSERT_EQ(s.warnings.size(), 1u);
    EXPECT_NE(s.warnings[0].find("clamped"), std::string::npos);
    p.damping = 2.0 * ref.damping;
    EXPECT_TRUE(solve(p).warnings.empty());
    p.damping = 0.0;
    EXPECT_THROW(solve(p), std::invalid_argument);
}

TEST(Solve, NonConvergenceIsReportedNotThrown) {
    const Expression g{"sin", {0, 3.0}};
    auto p = base(DomainSpec::ball(2, {0, 0, 0}, 1.0), OperatorSpec::minmax(1, 1), constant(0.0), g.field());
    p.max_iterations = 3;
    const auto s = solve(p);
    EXPECT_FALSE(s.converged);
    EXPECT_EQ(s.iterations, 3);
    EXPECT_EQ(s.residual_history.size(), 3u);
    EXPECT_EQ(residual_csv(s).substr(0, 15), "iter,residual\n1");
}

TEST(Solve, BadInputsAreHardErrors) {
    const auto d = DomainSpec::ball(2, {0, 0, 0}, 1.0);
    EXPECT_THROW(solve(base(d, OperatorSpec::minmax(1, 1), constant(NAN), constant(0.0))), std::invalid_argument);
    EXPECT_THROW(solve(base(d, OperatorSpec::minmax(1, 1), constant(0.0), constant(INFINITY))), std::invalid_argument);
    auto p = base(d, OperatorSpec::minmax(1, 1), constant(0.0), constant(0.0));
    p.f = nullptr;
    EXPECT_THROW(solve(p), std::invalid_argument);
}

TEST(Solve, GrowthGuardStopsDivergence) {
    Solution s{build_grid(DomainSpec::unit_cube(2), 0.25)};
    s.residual_history = {2.0};
    EXPECT_NO_THROW(check_growth(s, 1e8));
    EXPECT_THROW(check_growth(s, 3e8), std::runtime_error);
    s.residual_history = {1e-3};  // small starts are measured against 1
    EXPECT_NO_THROW(check_growth(s, 5e7));
}

TEST(Convergence, AffineRowsHaveNoOrder) {
    const Expression g{"affine", {0.1, 1.0, 1.0}};
    auto p = base(DomainSpec::ball(2, {0, 0, 0}, 1.0), OperatorSpec::minmax(1, 1), constant(0.0), g.field());
    const auto rows = convergence_study(p, g.field(), std::vector<double>{0.25, 0.125});
    ASSERT_EQ(rows.size(), 2u);
    for (const auto& r : rows) {
        EXPECT_LE(r.error, 1e-10);
        EXPECT_FALSE(r.observed_order);
    }
    EXPECT_NE(convergence_csv(rows).find(",n/a,"), std::string::npos);
}

TEST(Convergence, SpectralLaplacianIsSecondOrder) {
    const Expression exact{"log_radius", {1.0}};
    auto p = base(DomainSpec::annulus(2, {0, 0, 0}, 0.5, 1.0), OperatorSpec::weighted(Weights{1, 1}), constant(0.0),
                  exact.field(), Backend::spectral);
    const auto rows = convergence_study(p, exact.field(), std::vector<double>{1.0 / 8, 1.0 / 16, 1.0 / 32});
    ASSERT_TRUE(rows.back().observed_order);
    EXPECT_GT(*rows.back().observed_order, 1.5);
    EXPECT_LT(rows.back().error, rows.front().error);
}

TEST(Convergence, FailuresAreRecordedPerRow) {
    const Expression g{"affine", {0.1, 1.0, 1.0}};
    auto p = base(DomainSpec::unit_cube(2), OperatorSpec::minmax(1, 1), constant(0.0), g.field());
    const auto rows = convergence_study(p, g.field(), std::vector<double>{0.4, 0.125});
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_FALSE(rows[0].failure.empty());
    EXPECT_TRUE(std::isnan(rows[0].error));
    EXPECT_TRUE(rows[1].failure.empty());
    EXPECT_FALSE(rows[1].observed_order);
}
