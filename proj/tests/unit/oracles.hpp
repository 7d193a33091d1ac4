#pragma once

// Reference computations that share no code with the library.

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

using Dense = std::vector<std::vector<double>>;

/// Number of eigenvalues of a below sigma, by Sylvester's law of inertia on
/// the LDL^T pivots of a - sigma I (no pivoting; zero pivots nudged).
inline int count_below(const Dense& a, double sigma) {
    const std::size_t n = a.size();
    Dense m = a;
    for (std::size_t i = 0; i < n; ++i) m[i][i] -= sigma;
    int neg = 0;
    for (std::size_t k = 0; k < n; ++k) {
        double p = m[k][k];
        if (p == 0.0) p = -1e-300;
        if (p < 0.0) ++neg;
        for (std::size_t i = k + 1; i < n; ++i) {
            const double l = m[i][k] / p;
            for (std::size_t j = k + 1; j < n; ++j) m[i][j] -= l * m[k][j];
        }
    }
    return neg;
}

/// Ascending eigenvalues by bisection on the inertia count.
inline std::vector<double> eigenvalues(const Dense& a) {
    const std::size_t n = a.size();
    double r = 0.0;  // Gershgorin radius bound
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += std::abs(a[i][j]);
        r = std::max(r, s);
    }
    std::vector<double> out;
    for (std::size_t k = 0; k < n; ++k) {
        double lo = -r - 1.0, hi = r + 1.0;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + r); ++it) {
            const double mid = 0.5 * (lo + hi);
            if (count_below(a, mid) > static_cast<int>(k)) hi = mid;
            else lo = mid;
        }
        out.push_back(0.5 * (lo + hi));
    }
    return out;
}

inline Dense diag(std::vector<double> d) {
    Dense m(d.size(), std::vector<double>(d.size(), 0.0));
    for (std::size_t i = 0; i < d.size(); ++i) m[i][i] = d[i];
    return m;
}

}  // namespace oracle
