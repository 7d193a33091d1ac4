#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wpt/util/format.hpp"

namespace wpt {

/// Largest matrix dimension handled by the dense kernels.
inline constexpr int kMaxDim = 5;

/// Fixed-capacity vector of at most kMaxDim doubles; no heap traffic in the
/// per-node solver kernels.
class SmallVector {
public:
    SmallVector() = default;
    explicit SmallVector(int n, double fill = 0.0) : n_(n) {
        if (n < 0 || n > kMaxDim) throw std::invalid_argument("SmallVector: size out of range");
        v_.fill(0.0);
        std::fill_n(v_.begin(), n, fill);
    }
    SmallVector(std::initializer_list<double> xs) : SmallVector(static_cast<int>(xs.size())) {
        std::copy(xs.begin(), xs.end(), v_.begin());
    }

    int size() const noexcept { return n_; }
    double& operator[](int i) noexcept { return v_[static_cast<std::size_t>(i)]; }
    double operator[](int i) const noexcept { return v_[static_cast<std::size_t>(i)]; }
    double* begin() noexcept { return v_.data(); }
    double* end() noexcept { return v_.data() + n_; }
    const double* begin() const noexcept { return v_.data(); }
    const double* end() const noexcept { return v_.data() + n_; }
    std::span<const double> span() const noexcept { return {v_.data(), static_cast<std::size_t>(n_)}; }
    std::vector<double> to_vector() const { return {begin(), end()}; }

    double dot(const SmallVector& o) const noexcept {
        double s = 0.0;
        for (int i = 0; i < n_; ++i) s += v_[i] * o.v_[i];
        return s;
    }
    double norm() const noexcept { return std::sqrt(dot(*this)); }

private:
    int n_ = 0;
    std::array<double, kMaxDim> v_{};
};

/// Dense square matrix, row-major; used for rotations and eigenvector frames.
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(int n) : n_(n) {
        if (n < 1 || n > kMaxDim) throw std::invalid_argument("SquareMatrix: dimension out of range");
        a_.fill(0.0);
    }
    static SquareMatrix identity(int n) {
        SquareMatrix m(n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
    int dim() const noexcept { return n_; }
    double& operator()(int i, int j) noexcept { return a_[static_cast<std::size_t>(i * kMaxDim + j)]; }
    double operator()(int i, int j) const noexcept { return a_[static_cast<std::size_t>(i * kMaxDim + j)]; }

    SmallVector column(int j) const {
        SmallVector c(n_);
        for (int i = 0; i < n_; ++i) c[i] = (*this)(i, j);
        return c;
    }
    SquareMatrix transpose() const {
        SquareMatrix t(n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) t(i, j) = (*this)(j, i);
        return t;
    }
    friend SquareMatrix operator*(const SquareMatrix& a, const SquareMatrix& b) {
        SquareMatrix c(a.n_);
        for (int i = 0; i < a.n_; ++i)
            for (int k = 0; k < a.n_; ++k) {
                const double aik = a(i, k);
                for (int j = 0; j < a.n_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

private:
    int n_ = 0;
    std::array<double, kMaxDim * kMaxDim> a_{};
};

/// Real symmetric n x n matrix, 1 <= n <= kMaxDim. Entries are symmetrized as
/// (X + X^T)/2 on construction and must be finite.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(int n) : n_(n) {
        if (n < 1 || n > kMaxDim) throw std::invalid_argument("SymMatrix: dimension out of range");
        a_.fill(0.0);
    }

    /// Row-major entries. Throws if any entry is non-finite or if the relative
    /// asymmetry max|x_ij - x_ji| / max|x_ij| exceeds asym_tol.
    static SymMatrix from_entries(int n, std::span<const double> rowmajor, double asym_tol = 1e-12) {
        if (rowmajor.size() != static_cast<std::size_t>(n * n))
            throw std::invalid_argument("SymMatrix: expected " + std::to_string(n * n) + " entries");
        SymMatrix m(n);
        double scale = 0.0, asym = 0.0;
        for (double x : rowmajor) {
            if (!std::isfinite(x)) throw std::invalid_argument("SymMatrix: non-finite entry");
            scale = std::max(scale, std::abs(x));
        }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double xij = rowmajor[static_cast<std::size_t>(i * n + j)];
                const double xji = rowmajor[static_cast<std::size_t>(j * n + i)];
                asym = std::max(asym, std::abs(xij - xji));
                m.at(i, j) = 0.5 * (xij + xji);
            }
        if (asym > asym_tol * std::max(scale, 1e-300))
            throw std::invalid_argument("SymMatrix: input is not symmetric (relative asymmetry " +
                                        fmt17(asym / scale) + ")");
        return m;
    }

    static SymMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows,
                               double asym_tol = 1e-12) {
        const int n = static_cast<int>(rows.size());
        std::vector<double> e;
        for (const auto& r : rows) {
            if (static_cast<int>(r.size()) != n) throw std::invalid_argument("SymMatrix: ragged rows");
            e.insert(e.end(), r.begin(), r.end());
        }
        return from_entries(n, e, asym_tol);
    }

    static SymMatrix identity(int n) {
        SymMatrix m(n);
        for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
        return m;
    }

    static SymMatrix diagonal(const SmallVector& d) {
        SymMatrix m(d.size());
        for (int i = 0; i < d.size(); ++i) m.at(i, i) = d[i];
        return m;
    }

    /// v v^T
    static SymMatrix outer(const SmallVector& v) {
        SymMatrix m(v.size());
        for (int i = 0; i < v.size(); ++i)
            for (int j = 0; j < v.size(); ++j) m.at(i, j) = v[i] * v[j];
        return m;
    }

    int dim() const noexcept { return n_; }
    double operator()(int i, int j) const noexcept { return a_[idx(i, j)]; }

    /// Sets both (i,j) and (j,i).
    void set(int i, int j, double x) {
        if (!std::isfinite(x)) throw std::invalid_argument("SymMatrix: non-finite entry");
        a_[idx(i, j)] = x;
        a_[idx(j, i)] = x;
    }

    double trace() const noexcept {
        double t = 0.0;
        for (int i = 0; i < n_; ++i) t += (*this)(i, i);
        return t;
    }

    double frobenius() const noexcept {
        double s = 0.0;
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) s += (*this)(i, j) * (*this)(i, j);
        return std::sqrt(s);
    }

    double quad(const SmallVector& v) const noexcept {
        double s = 0.0;
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) s += v[i] * (*this)(i, j) * v[j];
        return s;
    }

    /// R^T X R
    SymMatrix congruence(const SquareMatrix& r) const {
        if (r.dim() != n_) throw std::invalid_argument("SymMatrix: dimension mismatch");
        const SquareMatrix t = r.transpose() * to_square() * r;
        SymMatrix out(n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) out.at(i, j) = 0.5 * (t(i, j) + t(j, i));
        return out;
    }

    SquareMatrix to_square() const {
        SquareMatrix s(n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) s(i, j) = (*this)(i, j);
        return s;
    }

    SymMatrix& operator+=(const SymMatrix& o) {
        check_same(o);
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
        return *this;
    }
    SymMatrix& operator-=(const SymMatrix& o) {
        check_same(o);
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
        return *this;
    }
    SymMatrix& operator*=(double s) noexcept {
        for (double& x : a_) x *= s;
        return *this;
    }
    friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
    friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
    friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }
    friend SymMatrix operator-(SymMatrix a) { return a *= -1.0; }
    friend bool operator==(const SymMatrix& a, const SymMatrix& b) {
        return a.n_ == b.n_ && a.a_ == b.a_;
    }

    /// Row-major CSV, one row per line, 17 significant digits.
    std::string to_csv() const {
        std::string out;
        for (int i = 0; i < n_; ++i) {
            for (int j = 0; j < n_; ++j) {
                if (j) out += ',';
                out += fmt17((*this)(i, j));
            }
            out += '\n';
        }
        return out;
    }

    static SymMatrix from_csv(const std::string& text, double asym_tol = 1e-12) {
        std::istringstream in(text);
        std::string line;
        std::vector<double> e;
        int rows = 0;
        std::size_t cols = 0;
        while (std::getline(in, line)) {
            if (trim(line).empty()) continue;
            const auto vals = parse_doubles(line);
            if (rows == 0) cols = vals.size();
            if (vals.size() != cols) throw std::invalid_argument("SymMatrix CSV: ragged rows");
            e.insert(e.end(), vals.begin(), vals.end());
            ++rows;
        }
        if (static_cast<std::size_t>(rows) != cols) throw std::invalid_argument("SymMatrix CSV: not square");
        return from_entries(rows, e, asym_tol);
    }

private:
    double& at(int i, int j) noexcept { return a_[idx(i, j)]; }
    static constexpr std::size_t idx(int i, int j) noexcept {
        return static_cast<std::size_t>(i * kMaxDim + j);
    }
    void check_same(const SymMatrix& o) const {
        if (o.n_ != n_) throw std::invalid_argument("SymMatrix: dimension mismatch");
    }

    int n_ = 0;
    std::array<double, kMaxDim * kMaxDim> a_{};
};

/// Ascending eigenvalues and matching orthonormal eigenvectors (columns).
struct Spectrum {
    SmallVector values;
    SquareMatrix vectors;
};

/// Cyclic Jacobi rotations. Deterministic; for n <= 5 converges in a handful
/// of sweeps to full double precision.
inline Spectrum spectrum(const SymMatrix& x) {
    const int n = x.dim();
    std::array<double, kMaxDim * kMaxDim> a{};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a[i * kMaxDim + j] = x(i, j);
    SquareMatrix v = SquareMatrix::identity(n);
    auto A = [&a](int i, int j) -> double& { return a[static_cast<std::size_t>(i * kMaxDim + j)]; };

    double fro2 = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) fro2 += A(i, j) * A(i, j);

    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
        if (off <= 1e-34 * fro2 || off == 0.0) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = A(p, q);
                if (apq == 0.0) continue;
                const double app = A(p, p), aqq = A(q, q);
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                A(p, p) = app - t * apq;
                A(q, q) = aqq + t * apq;
                A(p, q) = A(q, p) = 0.0;
                for (int k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = A(k, p), akq = A(k, q);
                    A(k, p) = A(p, k) = c * akp - s * akq;
                    A(k, q) = A(q, k) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::array<int, kMaxDim> order{};
    std::iota(order.begin(), order.begin() + n, 0);
    std::stable_sort(order.begin(), order.begin() + n,
                     [&](int i, int j) { return A(i, i) < A(j, j); });
    Spectrum s{SmallVector(n), SquareMatrix(n)};
    for (int k = 0; k < n; ++k) {
        s.values[k] = A(order[k], order[k]);
        for (int i = 0; i < n; ++i) s.vectors(i, k) = v(i, order[k]);
    }
    return s;
}

/// Eigenvalues in ascending order.
inline SmallVector eigenvalues(const SymMatrix& x) { return spectrum(x).values; }

/// V diag(values) V^T
inline SymMatrix reconstruct(const Spectrum& s) {
    const int n = s.values.size();
    SymMatrix out(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double acc = 0.0;
            for (int k = 0; k < n; ++k) acc += s.vectors(i, k) * s.values[k] * s.vectors(j, k);
            out.set(i, j, acc);
        }
    return out;
}

}  // namespace wpt
