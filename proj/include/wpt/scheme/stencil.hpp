#pragma once

#include <algorithm>
#include <array>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace wpt::scheme {

using Direction = std::array<int, 3>;

/// Wide-stencil direction set of order p: every integer vector with coprime
/// components and max-norm <= p, one representative per +/- pair (first
/// nonzero component positive), in lexicographic order. Orthogonal k-frames
/// drawn from the same set back the partial-trace operators.
class StencilSet {
public:
    StencilSet(int dim, int order) : dim_(dim), order_(order) {
        if (dim != 2 && dim != 3) throw std::invalid_argument("StencilSet: dimension must be 2 or 3");
        if (order < 1 || (dim == 2 && order > 8) || (dim == 3 && order > 4))
            throw std::invalid_argument("StencilSet: order must be in [1, 8] (2D) or [1, 4] (3D)");
        const int kz = dim == 3 ? order : 0;
        for (int i = -order; i <= order; ++i)
            for (int j = -order; j <= order; ++j)
                for (int k = -kz; k <= kz; ++k) {
                    const Direction d{i, j, k};
                    if (d == Direction{0, 0, 0} || !canonical(d)) continue;
                    if (std::gcd(std::gcd(std::abs(i), std::abs(j)), std::abs(k)) != 1) continue;
                    dirs_.push_back(d);
                }
        std::sort(dirs_.begin(), dirs_.end());
        build_frames();
    }

    /// Axes plus e_i +/- e_j: exactly the second differences needed for a
    /// central-difference Hessian.
    static StencilSet hessian(int dim) {
        StencilSet s(dim);
        for (int i = 0; i < dim; ++i) {
            Direction e{0, 0, 0};
            e[static_cast<std::size_t>(i)] = 1;
            s.dirs_.push_back(e);
        }
        for (int i = 0; i < dim; ++i)
            for (int j = i + 1; j < dim; ++j) {
                Direction p{0, 0, 0}, m{0, 0, 0};
                p[static_cast<std::size_t>(i)] = m[static_cast<std::size_t>(i)] = 1;
                p[static_cast<std::size_t>(j)] = 1;
                m[static_cast<std::size_t>(j)] = -1;
                s.dirs_.push_back(p);
                s.dirs_.push_back(m);
            }
        s.build_frames();
        return s;
    }

    int dim() const noexcept { return dim_; }
    int order() const noexcept { return order_; }
    const std::vector<Direction>& directions() const noexcept { return dirs_; }
    std::size_t size() const noexcept { return dirs_.size(); }

    /// Index lists of mutually orthogonal directions; frames(1) is every
    /// singleton. In 2D frames(2) is the orthogonal-pair list.
    const std::vector<std::vector<int>>& frames(int k) const {
        if (k < 1 || k > dim_) throw std::invalid_argument("StencilSet: frame size out of range");
        return frames_[static_cast<std::size_t>(k - 1)];
    }

    int index_of(const Direction& d) const {
        for (std::size_t i = 0; i < dirs_.size(); ++i)
            if (dirs_[i] == d) return static_cast<int>(i);
        return -1;
    }

private:
    explicit StencilSet(int dim) : dim_(dim), order_(1) {}

    static bool canonical(const Direction& d) {
        for (int c : d)
            if (c != 0) return c > 0;
        return false;
    }
    static long dot(const Direction& a, const Direction& b) {
        return static_cast<long>(a[0]) * b[0] + static_cast<long>(a[1]) * b[1] + static_cast<long>(a[2]) * b[2];
    }

    void build_frames() {
        frames_.assign(static_cast<std::size_t>(dim_), {});
        const int m = static_cast<int>(dirs_.size());
        for (int i = 0; i < m; ++i) frames_[0].push_back({i});
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) {
                if (dot(dirs_[static_cast<std::size_t>(i)], dirs_[static_cast<std::size_t>(j)]) != 0) continue;
                frames_[1].push_back({i, j});
                if (dim_ == 3)
                    for (int k = j + 1; k < m; ++k)
                        if (dot(dirs_[static_cast<std::size_t>(i)], dirs_[static_cast<std::size_t>(k)]) == 0 &&
                            dot(dirs_[static_cast<std::size_t>(j)], dirs_[static_cast<std::size_t>(k)]) == 0)
                            frames_[2].push_back({i, j, k});
            }
    }

    int dim_;
    int order_;
    std::vector<Direction> dirs_;
    std::vector<std::vector<std::vector<int>>> frames_;
};

}  // namespace wpt::scheme
