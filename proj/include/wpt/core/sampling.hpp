#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "wpt/core/operator.hpp"
#include "wpt/core/sym_matrix.hpp"
#include "wpt/util/rng.hpp"

namespace wpt {

/// Ordered orthonormal k-tuple.
using Frame = std::vector<SmallVector>;

inline SmallVector unit_axis(int n, int i) {
    SmallVector e(n);
    e[i] = 1.0;
    return e;
}

inline SmallVector normalized(SmallVector v) {
    const double r = v.norm();
    if (!(r > 0.0)) throw std::invalid_argument("cannot normalize a zero vector");
    for (double& x : v) x /= r;
    return v;
}

/// `count` unit vectors in R^n: the coordinate axes first, then uniform half-circle
/// angles (n = 2), a Fibonacci lattice (n = 3) or normalized Gaussians (n >= 4).
/// The seed only shifts the lattice phase, so every seed gives an equally
/// uniform set.
inline std::vector<SmallVector> sphere_directions(int n, std::size_t count, std::uint64_t seed = 0) {
    if (n < 2 || n > kMaxDim) throw std::invalid_argument("sphere_directions: dimension out of range");
    std::vector<SmallVector> out;
    out.reserve(count);
    for (int i = 0; i < n && out.size() < count; ++i) out.push_back(unit_axis(n, i));
    const std::size_t m = count - out.size();
    CounterRng rng(seed, 0x5eed);
    if (n == 2) {
        const double phase = rng.uniform() * std::numbers::pi / static_cast<double>(std::max<std::size_t>(m, 1));
        for (std::size_t k = 0; k < m; ++k) {
            const double t = phase + std::numbers::pi * static_cast<double>(k) / static_cast<double>(m);
            out.push_back(SmallVector{std::cos(t), std::sin(t)});
        }
    } else if (n == 3) {
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        const double phase = 2.0 * std::numbers::pi * rng.uniform();
        for (std::size_t k = 0; k < m; ++k) {
            const double z = 1.0 - 2.0 * (static_cast<double>(k) + 0.5) / static_cast<double>(m);
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double t = phase + golden * static_cast<double>(k);
            out.push_back(SmallVector{r * std::cos(t), r * std::sin(t), z});
        }
    } else {
        for (std::size_t k = 0; k < m; ++k) {
            SmallVector v(n);
            for (double& x : v) x = rng.normal();
            out.push_back(normalized(v));
        }
    }
    return out;
}

/// Gram-Schmidt; returns false when the input is numerically rank deficient.
inline bool orthonormalize(Frame& f) {
    for (std::size_t i = 0; i < f.size(); ++i) {
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t j = 0; j < i; ++j) {
                const double c = f[i].dot(f[j]);
                for (int t = 0; t < f[i].size(); ++t) f[i][t] -= c * f[j][t];
            }
        const double r = f[i].norm();
        if (r < 1e-10) return false;
        for (double& x : f[i]) x /= r;
    }
    return true;
}

/// Coordinate k-frames (all k-subsets of the axes) followed by random
/// orthonormal frames up to `count` frames in total.
inline std::vector<Frame> sample_frames(int n, int k, std::size_t count, std::uint64_t seed = 0) {
    if (k < 1 || k > n) throw std::invalid_argument("sample_frames: need 1 <= k <= n");
    std::vector<Frame> out;
    if (k == 1) {
        for (auto& d : sphere_directions(n, count, seed)) out.push_back(Frame{d});
        return out;
    }
    std::vector<int> pick(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) pick[static_cast<std::size_t>(i)] = i;
    while (out.size() < count) {
        Frame f;
        for (int i : pick) f.push_back(unit_axis(n, i));
        out.push_back(std::move(f));
        int i = k - 1;
        while (i >= 0 && pick[static_cast<std::size_t>(i)] == n - k + i) --i;
        if (i < 0) break;
        ++pick[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j) pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
    }
    CounterRng rng(seed, 0xf4a3e);
    while (out.size() < count) {
        Frame f(static_cast<std::size_t>(k), SmallVector(n));
        for (auto& v : f)
            for (double& x : v) x = rng.normal();
        if (orthonormalize(f)) out.push_back(std::move(f));
    }
    return out;
}

struct IsaacsBounds {
    double lower;  // sup over sampled xi of the exact inf over eta orthogonal to xi
    double upper;  // inf over sampled xi of the exact sup over eta orthogonal to xi
};

/// One-sided sampled bounds on the min-max operator lambda_1 + lambda_n via
/// its sup-inf and inf-sup two-plane representations. The outer variable xi
/// is sampled; the inner optimum over eta in xi^perp is computed exactly as
/// an extreme eigenvalue of X restricted to xi^perp, so lower <= M(X) <= upper
/// holds for every sample set.
inline IsaacsBounds isaacs_estimate(const SymMatrix& x, std::span<const SmallVector> directions) {
    const int n = x.dim();
    if (n < 2) throw std::invalid_argument("isaacs_estimate: dimension must be at least 2");
    if (directions.size() < static_cast<std::size_t>(n))
        throw std::invalid_argument("isaacs_estimate: need at least n sample directions");
    IsaacsBounds b{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    for (const auto& raw : directions) {
        if (raw.size() != n) throw std::invalid_argument("isaacs_estimate: direction dimension mismatch");
        const SmallVector xi = normalized(raw);
        // Householder reflection H with H xi = s e_1; columns 2..n of H span xi^perp.
        SmallVector v = xi;
        const double s = xi[0] >= 0.0 ? -1.0 : 1.0;
        v[0] -= s;
        const double vv = v.dot(v);
        SquareMatrix h = SquareMatrix::identity(n);
        if (vv > 0.0)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) h(i, j) -= 2.0 * v[i] * v[j] / vv;
        const SymMatrix hxh = x.congruence(h);
        SymMatrix restricted(n - 1);
        for (int i = 1; i < n; ++i)
            for (int j = i; j < n; ++j) restricted.set(i - 1, j - 1, hxh(i, j));
        const SmallVector mu = eigenvalues(restricted);
        const double q = x.quad(xi);
        b.lower = std::max(b.lower, q + mu[0]);
        b.upper = std::min(b.upper, q + mu[n - 2]);
    }
    return b;
}

inline IsaacsBounds isaacs_estimate(const SymMatrix& x, std::size_t samples, std::uint64_t seed = 0) {
    if (samples < static_cast<std::size_t>(x.dim()))
        throw std::invalid_argument("isaacs_estimate: need at least n sample directions");
    const auto dirs = sphere_directions(x.dim(), samples, seed);
    return isaacs_estimate(x, dirs);
}

/// Sampled Bellman form of the partial trace operators: for sign + the max over
/// frames of sum <X v_i, v_i> (a lower bound of P_k^+), for sign - the min (an
/// upper bound of P_k^-).
inline double bellman_estimate(int k, Sign sign, const SymMatrix& x, std::span<const Frame> frames) {
    const int n = x.dim();
    if (k < 1 || k > n) throw std::invalid_argument("bellman_estimate: need 1 <= k <= n");
    if (frames.empty()) throw std::invalid_argument("bellman_estimate: empty frame set");
    double best = sign == Sign::plus ? -std::numeric_limits<double>::infinity()
                                     : std::numeric_limits<double>::infinity();
    for (const auto& f : frames) {
        if (static_cast<int>(f.size()) != k) throw std::invalid_argument("bellman_estimate: frame size differs from k");
        double s = 0.0;
        for (const auto& v : f) {
            if (v.size() != n) throw std::invalid_argument("bellman_estimate: frame dimension mismatch");
            s += x.quad(v);
        }
        best = sign == Sign::plus ? std::max(best, s) : std::min(best, s);
    }
    return best;
}

/// Haar-distributed orthogonal matrix from QR of a Gaussian matrix.
inline SquareMatrix random_orthogonal(int n, CounterRng& rng) {
    Frame cols;
    do {
        cols.assign(static_cast<std::size_t>(n), SmallVector(n));
        for (auto& c : cols)
            for (double& x : c) x = rng.normal();
    } while (!orthonormalize(cols));
    SquareMatrix q(n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) q(i, j) = cols[static_cast<std::size_t>(j)][i];
    return q;
}

/// Symmetric matrix with i.i.d. N(0, scale^2) upper-triangle entries.
inline SymMatrix random_symmetric(int n, CounterRng& rng, double scale = 1.0) {
    SymMatrix x(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) x.set(i, j, scale * rng.normal());
    return x;
}

/// B^T B with Gaussian B; rank r <= n lets the degenerate directions be probed.
inline SymMatrix random_psd(int n, CounterRng& rng, int rank = -1) {
    if (rank < 0) rank = n;
    SymMatrix p(n);
    for (int r = 0; r < rank; ++r) {
        SmallVector b(n);
        for (double& x : b) x = rng.normal();
        p += SymMatrix::outer(b);
    }
    return p;
}

}  // namespace wpt
