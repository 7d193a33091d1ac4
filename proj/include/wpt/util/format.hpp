#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wpt {

/// 17 significant digits: enough for an exact double round trip.
inline std::string fmt17(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline double parse_double(std::string_view s) {
    const std::string t = trim(s);
    if (t.empty()) throw std::invalid_argument("empty number");
    if (t == "inf") return INFINITY;
    if (t == "-inf") return -INFINITY;
    if (t == "nan") return NAN;
    double v = 0.0;
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || p != t.data() + t.size())
        throw std::invalid_argument("not a number: '" + t + "'");
    return v;
}

inline long long parse_int(std::string_view s) {
    const std::string t = trim(s);
    long long v = 0;
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc{} || p != t.data() + t.size())
        throw std::invalid_argument("not an integer: '" + t + "'");
    return v;
}

inline std::vector<double> parse_doubles(std::string_view s, char sep = ',') {
    std::vector<double> out;
    if (trim(s).empty()) return out;
    for (const auto& tok : split(s, sep)) out.push_back(parse_double(tok));
    return out;
}

inline std::string join_doubles(const std::vector<double>& v, const char* sep = ", ") {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        out += fmt17(v[i]);
    }
    return out;
}

}  // namespace wpt
