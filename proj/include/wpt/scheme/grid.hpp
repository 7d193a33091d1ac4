#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "wpt/scheme/domain.hpp"
#include "wpt/scheme/expression.hpp"

namespace wpt::scheme {

enum class NodeClass : std::uint8_t { interior = 0, boundary = 1, exterior = 2 };

/// Uniform Cartesian lattice: node (i, j, k) sits at origin + (i h0, j h1, k h2).
/// Linear index is row-major with the last axis fastest.
struct GridLayout {
    int dim = 2;
    std::array<int, 3> dims{1, 1, 1};
    Point origin{};
    std::array<double, 3> spacing{1.0, 1.0, 1.0};

    std::size_t size() const noexcept {
        return static_cast<std::size_t>(dims[0]) * static_cast<std::size_t>(dims[1]) * static_cast<std::size_t>(dims[2]);
    }
    std::array<long, 3> strides() const noexcept {
        return {static_cast<long>(dims[1]) * dims[2], static_cast<long>(dims[2]), 1L};
    }
    std::size_t index(int i, int j, int k = 0) const noexcept {
        return (static_cast<std::size_t>(i) * static_cast<std::size_t>(dims[1]) + static_cast<std::size_t>(j)) *
                   static_cast<std::size_t>(dims[2]) +
               static_cast<std::size_t>(k);
    }
    std::array<int, 3> multi_index(std::size_t idx) const noexcept {
        const auto k = static_cast<int>(idx % static_cast<std::size_t>(dims[2]));
        idx /= static_cast<std::size_t>(dims[2]);
        const auto j = static_cast<int>(idx % static_cast<std::size_t>(dims[1]));
        const auto i = static_cast<int>(idx / static_cast<std::size_t>(dims[1]));
        return {i, j, k};
    }
    Point point(std::size_t idx) const noexcept {
        const auto m = multi_index(idx);
        Point p{};
        for (int a = 0; a < dim; ++a) p[a] = origin[a] + m[a] * spacing[a];
        return p;
    }
    double min_spacing() const noexcept {
        double h = spacing[0];
        for (int a = 1; a < dim; ++a) h = std::min(h, spacing[a]);
        return h;
    }
    /// Volume of one cell, h0 h1 (h2).
    double cell_volume() const noexcept {
        double v = 1.0;
        for (int a = 0; a < dim; ++a) v *= spacing[a];
        return v;
    }

    friend bool operator==(const GridLayout&, const GridLayout&) = default;
};

/// Node values on a lattice covering a domain. Boundary nodes are the lattice
/// nodes within h/2 of the boundary; interior nodes lie deeper inside;
/// exterior nodes are never read and hold NaN.
struct GridFunction {
    DomainSpec domain;
    GridLayout layout;
    std::vector<double> values;
    std::vector<NodeClass> cls;

    std::size_t size() const noexcept { return values.size(); }
    Point point(std::size_t idx) const noexcept { return layout.point(idx); }
    bool is_interior(std::size_t idx) const noexcept { return cls[idx] == NodeClass::interior; }

    std::vector<std::size_t> nodes_of(NodeClass c) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < cls.size(); ++i)
            if (cls[i] == c) out.push_back(i);
        return out;
    }
    std::size_t count(NodeClass c) const {
        return static_cast<std::size_t>(std::count(cls.begin(), cls.end(), c));
    }
};

inline constexpr std::size_t kMaxGridNodes = 40'000'000;

/// Classifies a lattice of spacing h centered on the domain's bounding box.
/// Throws when the lattice has fewer than 4 cells per axis or no interior node.
inline GridFunction build_grid(const DomainSpec& d, double h) {
    if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("build_grid: h must be positive");
    const auto [lo, hi] = d.bounds();
    GridLayout g;
    g.dim = d.dim();
    std::size_t total = 1;
    for (int a = 0; a < g.dim; ++a) {
        const double cells = (hi[a] - lo[a]) / h;
        const double r = std::round(cells);
        const int n = static_cast<int>(std::abs(cells - r) < 1e-9 * std::max(1.0, r) ? r : std::ceil(cells));
        if (n < 4) throw std::invalid_argument("build_grid: grid too coarse (fewer than 4 cells on axis " + std::to_string(a) + ")");
        g.dims[static_cast<std::size_t>(a)] = n + 1;
        g.spacing[static_cast<std::size_t>(a)] = h;
        g.origin[static_cast<std::size_t>(a)] = 0.5 * (lo[a] + hi[a]) - 0.5 * n * h;
        total *= static_cast<std::size_t>(n + 1);
        if (total > kMaxGridNodes) throw std::invalid_argument("build_grid: grid too fine");
    }
    GridFunction u{d, g, std::vector<double>(g.size(), std::numeric_limits<double>::quiet_NaN()),
                   std::vector<NodeClass>(g.size(), NodeClass::exterior)};
    std::size_t interior = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double sd = d.signed_distance(g.point(i));
        if (sd < -0.5 * h) {
            u.cls[i] = NodeClass::interior;
            u.values[i] = 0.0;
            ++interior;
        } else if (sd <= 0.5 * h) {
            u.cls[i] = NodeClass::boundary;
            u.values[i] = 0.0;
        }
    }
    if (interior == 0) throw std::invalid_argument("build_grid: grid too coarse (no interior node)");
    return u;
}

/// Boundary nodes take g at their nearest boundary point.
inline void assign_boundary(GridFunction& u, const ScalarField& g) {
    for (std::size_t i = 0; i < u.size(); ++i)
        if (u.cls[i] == NodeClass::boundary) {
            const double v = g(u.domain.nearest_boundary_point(u.point(i)));
            if (!std::isfinite(v)) throw std::invalid_argument("boundary data is not finite at a boundary node");
            u.values[i] = v;
        }
}

// ---- binary snapshot ------------------------------------------------------
//
// "WPTGRID1", u32 dim, u32 dims[dim], f64 origin[dim], f64 spacing[dim],
// f64 values[N] (row-major), u8 class[N]; all little-endian.

struct Snapshot {
    GridLayout layout;
    std::vector<double> values;
    std::vector<NodeClass> cls;
};

namespace detail {
template <class T>
void put_le(std::string& out, T v) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    out.append(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}
template <class T>
T get_le(const std::string& in, std::size_t& pos) {
    if (pos + sizeof(T) > in.size()) throw std::runtime_error("snapshot: truncated file");
    std::array<unsigned char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), in.data() + pos, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    pos += sizeof(T);
    return std::bit_cast<T>(bytes);
}
}  // namespace detail

inline std::string encode_snapshot(const GridLayout& g, const std::vector<double>& values,
                                   const std::vector<NodeClass>& cls) {
    if (values.size() != g.size() || cls.size() != g.size())
        throw std::invalid_argument("snapshot: array sizes do not match the layout");
    std::string out = "WPTGRID1";
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.dim));
    for (int a = 0; a < g.dim; ++a) detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.dims[a]));
    for (int a = 0; a < g.dim; ++a) detail::put_le<double>(out, g.origin[a]);
    for (int a = 0; a < g.dim; ++a) detail::put_le<double>(out, g.spacing[a]);
    for (double v : values) detail::put_le<double>(out, v);
    for (NodeClass c : cls) out.push_back(static_cast<char>(c));
    return out;
}

inline std::string encode_snapshot(const GridFunction& u) { return encode_snapshot(u.layout, u.values, u.cls); }

inline Snapshot decode_snapshot(const std::string& bytes) {
    if (bytes.size() < 12 || bytes.compare(0, 8, "WPTGRID1") != 0) throw std::runtime_error("snapshot: bad magic");
    std::size_t pos = 8;
    Snapshot s;
    const auto dim = detail::get_le<std::uint32_t>(bytes, pos);
    if (dim < 1 || dim > 3) throw std::runtime_error("snapshot: bad dimension");
    s.layout.dim = static_cast<int>(dim);
    for (int a = 0; a < s.layout.dim; ++a) s.layout.dims[a] = static_cast<int>(detail::get_le<std::uint32_t>(bytes, pos));
    for (int a = 0; a < s.layout.dim; ++a) s.layout.origin[a] = detail::get_le<double>(bytes, pos);
    for (int a = 0; a < s.layout.dim; ++a) s.layout.spacing[a] = detail::get_le<double>(bytes, pos);
    const std::size_t n = s.layout.size();
    if (bytes.size() != pos + n * 9) throw std::runtime_error("snapshot: size does not match header");
    s.values.resize(n);
    for (auto& v : s.values) v = detail::get_le<double>(bytes, pos);
    s.cls.resize(n);
    for (auto& c : s.cls) {
        const auto b = static_cast<std::uint8_t>(bytes[pos++]);
        if (b > 2) throw std::runtime_error("snapshot: bad node class");
        c = static_cast<NodeClass>(b);
    }
    return s;
}

inline void write_snapshot(const GridFunction& u, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    const std::string b = encode_snapshot(u);
    f.write(b.data(), static_cast<std::streamsize>(b.size()));
}

inline Snapshot read_snapshot(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::string b((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return decode_snapshot(b);
}

}  // namespace wpt::scheme
