#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wpt/util/format.hpp"

namespace wpt {

/// Coefficient vector a = (a_1, ..., a_n) of M_a(X) = sum a_i lambda_i(X), with
/// lambda_1 <= ... <= lambda_n. Admissible iff every a_i >= 0 and max a_i > 0.
class Weights {
public:
    explicit Weights(std::vector<double> a) : a_(std::move(a)) {
        if (a_.size() < 2) throw std::invalid_argument("Weights: dimension must be at least 2");
        for (double x : a_) {
            if (!std::isfinite(x)) throw std::invalid_argument("Weights: non-finite coefficient");
            if (x < 0.0) throw std::invalid_argument("Weights: negative coefficient " + fmt17(x));
        }
        if (max() <= 0.0) throw std::invalid_argument("Weights: all coefficients are zero");
    }
    Weights(std::initializer_list<double> a) : Weights(std::vector<double>(a)) {}

    /// All-ones: M_a = trace.
    static Weights laplacian(int n) { return Weights(std::vector<double>(static_cast<std::size_t>(n), 1.0)); }
    /// e_1 + e_n: the min-max operator lambda_1 + lambda_n.
    static Weights minmax(int n, double a1 = 1.0, double an = 1.0) {
        std::vector<double> a(static_cast<std::size_t>(n), 0.0);
        a.front() = a1;
        a.back() = an;
        return Weights(std::move(a));
    }

    int n() const noexcept { return static_cast<int>(a_.size()); }
    /// 0-based access; a(0) is a_1.
    double operator[](int i) const { return a_.at(static_cast<std::size_t>(i)); }
    double first() const noexcept { return a_.front(); }
    double last() const noexcept { return a_.back(); }
    std::span<const double> values() const noexcept { return a_; }

    /// |a| = sum a_i
    double total() const noexcept { return std::accumulate(a_.begin(), a_.end(), 0.0); }
    /// a~ = |a| / n
    double mean() const noexcept { return total() / static_cast<double>(n()); }
    /// a* = min(a_1, a_n)
    double a_star() const noexcept { return std::min(first(), last()); }
    /// a^_j = |a| - a_j (0-based j)
    double complement(int j) const { return total() - (*this)[j]; }
    double min() const noexcept { return *std::min_element(a_.begin(), a_.end()); }
    double max() const noexcept { return *std::max_element(a_.begin(), a_.end()); }

    /// (a_n, ..., a_1)
    Weights reversed() const { return Weights(std::vector<double>(a_.rbegin(), a_.rend())); }

    std::string to_string() const { return "(" + join_doubles(a_) + ")"; }

    friend bool operator==(const Weights&, const Weights&) = default;

private:
    std::vector<double> a_;
};

/// Membership of a weight vector in the nested operator classes
/// underline-A  subset  A = A_1 cap A_n  subset  bar-A.
struct ClassTag {
    bool in_bar_a = false;        // min a_i >= 0, max a_i > 0
    bool in_a1 = false;           // a_1 > 0
    bool in_an = false;           // a_n > 0
    bool in_a = false;            // a_1 > 0 and a_n > 0
    bool in_underline_a = false;  // all a_i > 0: uniformly elliptic
    /// (min a_i, max a_i) when uniformly elliptic.
    std::optional<std::pair<double, double>> ellipticity;
};

inline ClassTag classify(const Weights& w) {
    ClassTag t;
    t.in_bar_a = true;
    t.in_a1 = w.first() > 0.0;
    t.in_an = w.last() > 0.0;
    t.in_a = t.in_a1 && t.in_an;
    t.in_underline_a = w.min() > 0.0;
    if (t.in_underline_a) t.ellipticity = std::pair{w.min(), w.max()};
    return t;
}

}  // namespace wpt
