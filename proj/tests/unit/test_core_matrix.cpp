#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "wpt/core/sampling.hpp"
#include "wpt/core/sym_matrix.hpp"
#include "wpt/util/format.hpp"
#include "wpt/util/rng.hpp"

using namespace wpt;

namespace {

oracle::Dense dense(const SymMatrix& x) {
    oracle::Dense d(static_cast<std::size_t>(x.dim()), std::vector<double>(static_cast<std::size_t>(x.dim())));
    for (int i = 0; i < x.dim(); ++i)
        for (int j = 0; j < x.dim(); ++j) d[i][j] = x(i, j);
    return d;
}

}  // namespace

TEST(SymMatrix, RejectsBadInput) {
    EXPECT_THROW(SymMatrix(0), std::invalid_argument);
    EXPECT_THROW(SymMatrix(6), std::invalid_argument);
    const std::vector<double> asym{1, 2, 3, 4};
    EXPECT_THROW(SymMatrix::from_entries(2, asym), std::invalid_argument);
    const std::vector<double> inf{1, INFINITY, INFINITY, 1};
    EXPECT_THROW(SymMatrix::from_entries(2, inf), std::invalid_argument);
    const std::vector<double> three{1, 2, 3};
    EXPECT_THROW(SymMatrix::from_entries(2, three), std::invalid_argument);
}

TEST(SymMatrix, SymmetrizesWithinTolerance) {
    const std::vector<double> e{1, 2, 2 + 1e-15, 4};
    const SymMatrix m = SymMatrix::from_entries(2, e);
    EXPECT_EQ(m(0, 1), m(1, 0));
    EXPECT_NEAR(m(0, 1), 2.0, 1e-15);
}

TEST(SymMatrix, CsvRoundTripIsExact) {
    CounterRng rng(7);
    for (int n = 1; n <= kMaxDim; ++n) {
        const SymMatrix x = random_symmetric(n, rng, 3.0);
        EXPECT_EQ(SymMatrix::from_csv(x.to_csv()), x) << "n=" << n;
    }
}

TEST(SymMatrix, CsvRejectsRaggedAndNonSquare) {
    EXPECT_THROW(SymMatrix::from_csv("1,2\n3\n"), std::invalid_argument);
    EXPECT_THROW(SymMatrix::from_csv("1,2\n2,1\n0,0\n"), std::invalid_argument);
}

TEST(SymMatrix, TraceAndQuadraticForm) {
    const SymMatrix x = SymMatrix::from_rows({{2, 1, 0}, {1, 3, 0}, {0, 0, -4}});
    EXPECT_EQ(x.trace(), 1.0);
    EXPECT_EQ(x.quad(SmallVector{1, 1, 0}), 7.0);
    EXPECT_EQ(x.quad(SmallVector{0, 0, 1}), -4.0);
}

TEST(Eigenvalues, DiagonalIsSorted) {
    const auto ev = eigenvalues(SymMatrix::diagonal(SmallVector{3, -1, 2, 0}));
    EXPECT_EQ(ev.to_vector(), (std::vector<double>{-1, 0, 2, 3}));
}

TEST(Eigenvalues, MatchInertiaBisection) {
    CounterRng rng(11);
    for (int trial = 0; trial < 400; ++trial) {
        const int n = 1 + trial % kMaxDim;
        const SymMatrix x = random_symmetric(n, rng, 2.0);
        const auto ev = eigenvalues(x);
        const auto ref = oracle::eigenvalues(dense(x));
        for (int i = 0; i < n; ++i) EXPECT_NEAR(ev[i], ref[static_cast<std::size_t>(i)], 1e-11) << "trial " << trial;
    }
}

TEST(Eigenvalues, RepeatedEigenvalues) {
    CounterRng rng(3);
    const SquareMatrix q = random_orthogonal(4, rng);
    const SymMatrix x = SymMatrix::diagonal(SmallVector{1, 1, 1, -2}).congruence(q);
    const auto ev = eigenvalues(x);
    EXPECT_NEAR(ev[0], -2.0, 1e-13);
    for (int i = 1; i < 4; ++i) EXPECT_NEAR(ev[i], 1.0, 1e-13);
}

TEST(Spectrum, ReconstructsInput) {
    CounterRng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const SymMatrix x = random_symmetric(2 + trial % 4, rng);
        const SymMatrix y = reconstruct(spectrum(x));
        EXPECT_LT((x - y).frobenius(), 1e-12);
    }
}

TEST(Spectrum, VectorsAreOrthonormal) {
    CounterRng rng(6);
    const auto s = spectrum(random_symmetric(5, rng));
    const SquareMatrix g = s.vectors.transpose() * s.vectors;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) EXPECT_NEAR(g(i, j), i == j ? 1.0 : 0.0, 1e-13);
}

TEST(Spectrum, IsDeterministic) {
    CounterRng a(9), b(9);
    const SymMatrix x = random_symmetric(5, a), y = random_symmetric(5, b);
    EXPECT_EQ(eigenvalues(x).to_vector(), eigenvalues(y).to_vector());
}

TEST(RandomMatrices, OrthogonalAndPsd) {
    CounterRng rng(12);
    for (int n = 2; n <= 5; ++n) {
        const SquareMatrix q = random_orthogonal(n, rng);
        const SquareMatrix g = q.transpose() * q;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) EXPECT_NEAR(g(i, j), i == j ? 1.0 : 0.0, 1e-13);
        const auto ev = oracle::eigenvalues(dense(random_psd(n, rng, 1)));
        EXPECT_GT(ev.front(), -1e-12);
        EXPECT_NEAR(ev[static_cast<std::size_t>(n - 2)], 0.0, 1e-12);  // rank one
    }
}

TEST(CounterRng, SplitStreamsAreReproducibleAndDistinct) {
    const CounterRng root(42);
    CounterRng a = root.split(1), b = root.split(1), c = root.split(2);
    for (int i = 0; i < 10; ++i) {
        const auto x = a.next_u64();
        EXPECT_EQ(x, b.next_u64());
        EXPECT_NE(x, c.next_u64());
    }
}

TEST(CounterRng, UniformMoments) {
    CounterRng rng(1);
    double s = 0.0, s2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        s += u;
        s2 += u * u;
    }
    EXPECT_NEAR(s / n, 0.5, 5e-3);
    EXPECT_NEAR(s2 / n - 0.25, 1.0 / 12.0, 5e-3);
}

TEST(Format, SeventeenDigitsRoundTrip) {
    for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) EXPECT_EQ(parse_double(fmt17(x)), x);
    EXPECT_THROW(parse_double("1.5x"), std::invalid_argument);
    EXPECT_THROW(parse_int("2.5"), std::invalid_argument);
}
