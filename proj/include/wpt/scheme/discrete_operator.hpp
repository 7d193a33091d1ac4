#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wpt/core/operator.hpp"
#include "wpt/core/sym_matrix.hpp"
#include "wpt/scheme/grid.hpp"
#include "wpt/scheme/stencil.hpp"

namespace wpt::scheme {

enum class Backend { monotone, spectral };

inline std::string to_string(Backend b) { return b == Backend::monotone ? "monotone" : "spectral"; }
inline Backend parse_backend(const std::string& s) {
    if (s == "monotone") return Backend::monotone;
    if (s == "spectral") return Backend::spectral;
    throw std::invalid_argument("unknown backend '" + s + "' (expected monotone or spectral)");
}

/// Directional min/max representation of an operator, when it has one:
///   minmax       a1 min_d D_d u + an max_d D_d u
///   frame_min    c min over orthogonal k-frames of sum_{d in frame} D_d u
///   frame_max    same with max
struct MonotoneForm {
    enum class Kind { minmax, frame_min, frame_max };
    Kind kind = Kind::minmax;
    double a1 = 0.0;
    double an = 0.0;
    int k = 1;
    double c = 1.0;

    /// Number of directional second differences entering one evaluation.
    int entering() const noexcept {
        return kind == Kind::minmax ? (a1 > 0.0) + (an > 0.0) : k;
    }
};

/// Weighted vectors qualify when they are (a1, 0, ..., 0, an), c (1..1, 0..0)
/// or c (0..0, 1..1); every n = 2 vector is of the first kind.
inline std::optional<MonotoneForm> monotone_form(const OperatorSpec& op, int n) {
    using K = MonotoneForm::Kind;
    if (const auto* m = op.get_if<op::MinMax>()) return MonotoneForm{K::minmax, m->a1, m->an, 1, 1.0};
    if (const auto* p = op.get_if<op::PartialTrace>()) {
        if (p->k > n) throw std::invalid_argument("partial_trace: k exceeds dimension");
        if (p->k == 1)
            return p->sign == Sign::minus ? MonotoneForm{K::minmax, 1.0, 0.0, 1, 1.0} : MonotoneForm{K::minmax, 0.0, 1.0, 1, 1.0};
        return MonotoneForm{p->sign == Sign::minus ? K::frame_min : K::frame_max, 0.0, 0.0, p->k, 1.0};
    }
    const auto* w = op.get_if<op::Weighted>();
    if (!w) return std::nullopt;
    const Weights& a = w->w;
    if (a.n() != n) throw std::invalid_argument("operator: dimension mismatch");
    bool middle_zero = true;
    for (int i = 1; i + 1 < n; ++i) middle_zero = middle_zero && a[i] == 0.0;
    if (middle_zero) return MonotoneForm{K::minmax, a.first(), a.last(), 1, 1.0};
    // c (1..1, 0..0) or c (0..0, 1..1)
    const double c = a.max();
    int lead = 0, trail = 0;
    while (lead < n && a[lead] == c) ++lead;
    while (trail < n && a[n - 1 - trail] == c) ++trail;
    auto zeros = [&](int from, int to) {
        for (int i = from; i < to; ++i)
            if (a[i] != 0.0) return false;
        return true;
    };
    if (zeros(lead, n)) return MonotoneForm{K::frame_min, 0.0, 0.0, lead, c};
    if (zeros(0, n - trail)) return MonotoneForm{K::frame_max, 0.0, 0.0, trail, c};
    return std::nullopt;
}

/// One side of a directional second difference after boundary handling.
struct ResolvedArm {
    bool clipped = false;  // value does not come from the neighbor node
    double length = 0.0;   // physical arm length
    double value = 0.0;
    std::size_t neighbor = std::numeric_limits<std::size_t>::max();
};

/// Resolves x + sign h d. An interior neighbor reached without leaving the
/// domain is used as is. Otherwise the arm ends at the boundary crossing of
/// the ray and carries g there, even when that lies beyond a boundary-class
/// neighbor: the snapped value stored at such a node is off by O(h), which
/// would cost O(1/h) in the second difference.
inline ResolvedArm resolve_arm(const GridFunction& u, std::size_t node, const Direction& d, int sign,
                               const ScalarField& g) {
    const GridLayout& L = u.layout;
    const auto m = L.multi_index(node);
    const Point x = L.point(node);
    Point v{};
    std::array<int, 3> e = m;
    double len2 = 0.0;
    bool in_lattice = true;
    for (int a = 0; a < L.dim; ++a) {
        const auto s = static_cast<std::size_t>(a);
        v[s] = sign * d[s] * L.spacing[s];
        len2 += v[s] * v[s];
        e[s] = m[s] + sign * d[s];
        if (e[s] < 0 || e[s] >= L.dims[s]) in_lattice = false;
    }
    const double len = std::sqrt(len2);
    const std::size_t nb = in_lattice ? L.index(e[0], e[1], e[2]) : std::numeric_limits<std::size_t>::max();
    const double t = u.domain.ray_exit(x, v);

    if (in_lattice && u.cls[nb] == NodeClass::interior && t >= 1.0) return {false, len, u.values[nb], nb};
    if (!std::isfinite(t) || !(t > 0.0)) throw std::logic_error("stencil arm does not cross the boundary");
    Point y = x;
    for (int a = 0; a < L.dim; ++a) y[static_cast<std::size_t>(a)] += t * v[static_cast<std::size_t>(a)];
    const double gv = g(y);
    if (!std::isfinite(gv)) throw std::invalid_argument("boundary data is not finite at a boundary crossing");
    return {true, t * len, gv, nb};
}

/// (u+ - u0)/h+ and (u- - u0)/h- combined into the unequal-step second
/// difference; reduces to (u+ + u- - 2u0)/h^2 for equal arms.
inline double unequal_second_difference(double u0, double up, double lp, double um, double lm) {
    return 2.0 / (lp + lm) * ((up - u0) / lp + (um - u0) / lm);
}

/// Directional second difference of u at node along lattice direction d.
inline double second_difference(const GridFunction& u, std::size_t node, const Direction& d, const ScalarField& g) {
    if (!u.is_interior(node)) throw std::invalid_argument("second_difference: node is not interior");
    const ResolvedArm p = resolve_arm(u, node, d, +1, g);
    const ResolvedArm q = resolve_arm(u, node, d, -1, g);
    const double u0 = u.values[node];
    if (!p.clipped && !q.clipped) return (p.value + q.value - 2.0 * u0) / (p.length * p.length);
    return unequal_second_difference(u0, p.value, p.length, q.value, q.length);
}

inline constexpr std::size_t kMaxStencilDirections = 512;

namespace detail {

/// Eigenvalues only, ascending: closed form in 2D, cyclic Jacobi without
/// eigenvector accumulation in 3D. This is the inner loop of the spectral
/// backend.
inline SmallVector hessian_eigenvalues(const SymMatrix& h) {
    if (h.dim() == 2) {
        const double m = 0.5 * (h(0, 0) + h(1, 1));
        const double r = std::hypot(0.5 * (h(0, 0) - h(1, 1)), h(0, 1));
        return SmallVector{m - r, m + r};
    }
    if (h.dim() != 3) return eigenvalues(h);
    double a[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) a[i][j] = h(i, j);
    for (int sweep = 0; sweep < 16; ++sweep) {
        const double off = std::abs(a[0][1]) + std::abs(a[0][2]) + std::abs(a[1][2]);
        const double diag = std::abs(a[0][0]) + std::abs(a[1][1]) + std::abs(a[2][2]);
        if (off <= 1e-15 * (diag + off)) break;
        for (int p = 0; p < 2; ++p)
            for (int q = p + 1; q < 3; ++q) {
                const double apq = a[p][q];
                if (apq == 0.0) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                const double t = std::abs(theta) > 1e150 ? 0.5 / theta
                                                         : std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                a[p][p] -= t * apq;
                a[q][q] += t * apq;
                a[p][q] = a[q][p] = 0.0;
                const int r = 3 - p - q;
                const double arp = a[r][p], arq = a[r][q];
                a[r][p] = a[p][r] = c * arp - s * arq;
                a[r][q] = a[q][r] = s * arp + c * arq;
            }
    }
    double l0 = a[0][0], l1 = a[1][1], l2 = a[2][2];
    if (l0 > l1) std::swap(l0, l1);
    if (l1 > l2) std::swap(l1, l2);
    if (l0 > l1) std::swap(l0, l1);
    return SmallVector{l0, l1, l2};
}

/// Combines the directional second differences into the operator value.
inline double combine(Backend backend, const OperatorSpec& op, const std::optional<MonotoneForm>& form,
                      const StencilSet& st, const GridLayout& L, const double* delta) {
    const int m = static_cast<int>(st.size());
    if (backend == Backend::spectral) {
        const int n = L.dim;
        SymMatrix h(n);
        int idx = n;
        for (int i = 0; i < n; ++i) h.set(i, i, delta[i]);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const double hi = L.spacing[static_cast<std::size_t>(i)], hj = L.spacing[static_cast<std::size_t>(j)];
                h.set(i, j, (delta[idx] - delta[idx + 1]) * (hi * hi + hj * hj) / (4.0 * hi * hj));
                idx += 2;
            }
        return eval_sorted(op, hessian_eigenvalues(h));
    }
    using K = MonotoneForm::Kind;
    if (form->kind == K::minmax) {
        double lo = delta[0], hi = delta[0];
        for (int d = 1; d < m; ++d) {
            lo = std::min(lo, delta[d]);
            hi = std::max(hi, delta[d]);
        }
        double s = 0.0;
        if (form->a1 != 0.0) s += form->a1 * lo;
        if (form->an != 0.0) s += form->an * hi;
        return s;
    }
    const bool want_min = form->kind == K::frame_min;
    double best = want_min ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    for (const auto& f : st.frames(form->k)) {
        double s = 0.0;
        for (int d : f) s += delta[d];
        best = want_min ? std::min(best, s) : std::max(best, s);
    }
    return form->c * best;
}

inline std::optional<MonotoneForm> checked_form(const OperatorSpec& op, Backend backend, const StencilSet& st,
                                                const GridLayout& L) {
    const int n = L.dim;
    op.scale(n);  // dimension checks
    if (backend == Backend::spectral) return std::nullopt;
    if (op.get_if<op::PucciPlus>() || op.get_if<op::PucciMinus>())
        throw std::invalid_argument("monotone backend does not support Pucci operators; use the spectral backend");
    auto form = monotone_form(op, n);
    if (!form)
        throw std::invalid_argument("monotone backend supports minmax, partial traces and weights of the form "
                                    "(a1, 0, .., 0, an) or c(1..1, 0..0); use the spectral backend for " + op.to_string());
    if (form->kind != MonotoneForm::Kind::minmax) {
        for (int a = 1; a < n; ++a)
            if (L.spacing[static_cast<std::size_t>(a)] != L.spacing[0])
                throw std::invalid_argument("monotone frames need equal grid spacing on all axes");
        if (st.frames(form->k).empty()) throw std::invalid_argument("stencil has no orthogonal frame of the required size");
    }
    return form;
}

}  // namespace detail

/// Single-node evaluation; resolves the stencil arms on the fly. The spectral
/// backend always uses the Hessian stencil.
inline double discrete_operator(const OperatorSpec& op, const GridFunction& u, std::size_t node, const StencilSet& st,
                                Backend backend, const ScalarField& g) {
    const StencilSet used = backend == Backend::spectral ? StencilSet::hessian(u.layout.dim) : st;
    if (used.dim() != u.layout.dim) throw std::invalid_argument("stencil dimension does not match the grid");
    const auto form = detail::checked_form(op, backend, used, u.layout);
    std::array<double, kMaxStencilDirections> delta{};
    for (std::size_t d = 0; d < used.size(); ++d) delta[d] = second_difference(u, node, used.directions()[d], g);
    return detail::combine(backend, op, form, used, u.layout, delta.data());
}

/// Operator with precomputed stencil geometry on a fixed grid. Arms that do
/// not end on an interior node are stored per node (CSR, keyed by
/// 2 direction + side) together with their length and boundary value; all
/// other arms read the neighbor node directly. Evaluation is const and
/// thread-safe.
class DiscreteOperator {
public:
    struct Arm {
        std::uint32_t key;
        double length;
        double value;
    };

    DiscreteOperator(const GridFunction& u, OperatorSpec op, Backend backend, int order, const ScalarField& g)
        : op_(std::move(op)),
          backend_(backend),
          stencil_(backend == Backend::spectral ? StencilSet::hessian(u.layout.dim) : StencilSet(u.layout.dim, order)),
          layout_(u.layout) {
        if (stencil_.size() > kMaxStencilDirections) throw std::invalid_argument("stencil too large");
        form_ = detail::checked_form(op_, backend_, stencil_, layout_);
        const auto strides = layout_.strides();
        for (const auto& d : stencil_.directions()) {
            long off = 0;
            double len2 = 0.0;
            for (int a = 0; a < layout_.dim; ++a) {
                const auto s = static_cast<std::size_t>(a);
                off += d[s] * strides[s];
                len2 += (d[s] * layout_.spacing[s]) * (d[s] * layout_.spacing[s]);
            }
            offset_.push_back(off);
            inv_len2_.push_back(1.0 / len2);
            min_product_ = std::min(min_product_, len2);
        }
        interior_ = u.nodes_of(NodeClass::interior);
        row_.reserve(interior_.size() + 1);
        row_.push_back(0);
        for (std::size_t q = 0; q < interior_.size(); ++q) {
            for (std::size_t d = 0; d < stencil_.size(); ++d) {
                const ResolvedArm p = resolve_arm(u, interior_[q], stencil_.directions()[d], +1, g);
                const ResolvedArm m = resolve_arm(u, interior_[q], stencil_.directions()[d], -1, g);
                if (p.clipped) push_arm(2 * d, p);
                if (m.clipped) push_arm(2 * d + 1, m);
                min_product_ = std::min(min_product_, p.length * m.length);
            }
            row_.push_back(arms_.size());
        }
        for (std::size_t i = 0; i < u.size(); ++i)
            if (u.cls[i] == NodeClass::boundary) widen(u.values[i]);
    }

    const OperatorSpec& op() const noexcept { return op_; }
    Backend backend() const noexcept { return backend_; }
    const StencilSet& stencil() const noexcept { return stencil_; }
    const std::vector<std::size_t>& interior() const noexcept { return interior_; }
    std::size_t clipped_arms() const noexcept { return arms_.size(); }
    /// Smallest product h+ h- over the arms actually used.
    double min_arm_product() const noexcept { return min_product_; }
    /// Range of all Dirichlet values read by the stencils.
    std::pair<double, double> boundary_range() const noexcept { return {data_lo_, data_hi_}; }

    /// Second differences entering one evaluation: the directional count of
    /// the monotone form, or n(n+1) for the assembled Hessian.
    int entering_directions() const noexcept {
        return backend_ == Backend::spectral ? layout_.dim * (layout_.dim + 1) : form_->entering();
    }

    /// All directional second differences at interior node number q.
    void directional(std::size_t q, const double* u, double* delta) const {
        const auto i = static_cast<std::ptrdiff_t>(interior_[q]);
        const double u0 = u[i];
        const std::size_t m = stencil_.size();
        const Arm* a = arms_.data() + row_[q];
        const Arm* end = arms_.data() + row_[q + 1];
        if (a == end) {
            for (std::size_t d = 0; d < m; ++d)
                delta[d] = (u[i + offset_[d]] + u[i - offset_[d]] - 2.0 * u0) * inv_len2_[d];
            return;
        }
        for (std::size_t d = 0; d < m; ++d) {
            const auto kp = static_cast<std::uint32_t>(2 * d);
            bool clipped = false;
            double up, lp, um, lm;
            if (a != end && a->key == kp) {
                up = a->value;
                lp = a->length;
                ++a;
                clipped = true;
            } else {
                up = u[i + offset_[d]];
                lp = 0.0;
            }
            if (a != end && a->key == kp + 1) {
                um = a->value;
                lm = a->length;
                ++a;
                clipped = true;
            } else {
                um = u[i - offset_[d]];
                lm = 0.0;
            }
            if (!clipped) {
                delta[d] = (up + um - 2.0 * u0) * inv_len2_[d];
            } else {
                const double full = 1.0 / std::sqrt(inv_len2_[d]);
                delta[d] = unequal_second_difference(u0, up, lp > 0.0 ? lp : full, um, lm > 0.0 ? lm : full);
            }
        }
    }

    /// F_h[u] at interior node number q.
    double apply(std::size_t q, const double* u) const {
        std::array<double, kMaxStencilDirections> delta;
        directional(q, u, delta.data());
        return detail::combine(backend_, op_, form_, stencil_, layout_, delta.data());
    }

    /// Indices of the directions attaining min and max of the second
    /// differences at q; ties go to the lexicographically lowest direction.
    std::pair<int, int> active_directions(std::size_t q, const double* u) const {
        std::array<double, kMaxStencilDirections> delta;
        directional(q, u, delta.data());
        int lo = 0, hi = 0;
        for (int d = 1; d < static_cast<int>(stencil_.size()); ++d) {
            if (delta[static_cast<std::size_t>(d)] < delta[static_cast<std::size_t>(lo)]) lo = d;
            if (delta[static_cast<std::size_t>(d)] > delta[static_cast<std::size_t>(hi)]) hi = d;
        }
        return {lo, hi};
    }

private:
    void push_arm(std::size_t key, const ResolvedArm& r) {
        arms_.push_back({static_cast<std::uint32_t>(key), r.length, r.value});
        widen(r.value);
    }
    void widen(double v) {
        data_lo_ = std::min(data_lo_, v);
        data_hi_ = std::max(data_hi_, v);
    }

    OperatorSpec op_;
    Backend backend_;
    StencilSet stencil_;
    GridLayout layout_;
    std::optional<MonotoneForm> form_;
    std::vector<long> offset_;
    std::vector<double> inv_len2_;
    std::vector<std::size_t> interior_;
    std::vector<std::size_t> row_;
    std::vector<Arm> arms_;
    double min_product_ = std::numeric_limits<double>::infinity();
    double data_lo_ = std::numeric_limits<double>::infinity();
    double data_hi_ = -std::numeric_limits<double>::infinity();
};

}  // namespace wpt::scheme
