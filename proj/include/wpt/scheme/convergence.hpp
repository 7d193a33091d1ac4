#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "wpt/scheme/solver.hpp"

namespace wpt::scheme {

struct ConvergenceRow {
    double h = 0.0;
    int order = 1;
    double error = std::numeric_limits<double>::quiet_NaN();  // sup over interior nodes
    std::optional<double> observed_order;                    // vs the previous row
    bool converged = false;
    long iterations = 0;
    std::string failure;  // solver exception message, if any
};

/// Below this error the observed order is meaningless and reported as n/a.
inline constexpr double kOrderErrorFloor = 1e-10;

inline double max_interior_error(const GridFunction& u, const ScalarField& exact) {
    double e = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        if (u.is_interior(i)) e = std::max(e, std::abs(u.values[i] - exact(u.point(i))));
    return e;
}

/// Solves p at each (h, order) level and compares with exact. The observed
/// order is log(e_prev / e) / log(h_prev / h); n/a when h does not change or
/// either error is below kOrderErrorFloor.
inline std::vector<ConvergenceRow> convergence_study(Problem p, const ScalarField& exact,
                                                     const std::vector<std::pair<double, int>>& levels) {
    std::vector<ConvergenceRow> rows;
    for (const auto& [h, order] : levels) {
        ConvergenceRow row;
        row.h = h;
        row.order = order;
        p.h = h;
        p.order = order;
        try {
            const Solution s = solve(p);
            row.converged = s.converged;
            row.iterations = s.iterations;
            row.error = max_interior_error(s.u, exact);
        } catch (const std::exception& e) {
            row.failure = e.what();
        }
        if (!rows.empty()) {
            const auto& prev = rows.back();
            if (prev.h != row.h && prev.error > kOrderErrorFloor && row.error > kOrderErrorFloor &&
                std::isfinite(prev.error) && std::isfinite(row.error))
                row.observed_order = std::log(prev.error / row.error) / std::log(prev.h / row.h);
        }
        rows.push_back(row);
    }
    return rows;
}

inline std::vector<ConvergenceRow> convergence_study(const Problem& p, const ScalarField& exact,
                                                     const std::vector<double>& h_list) {
    std::vector<std::pair<double, int>> levels;
    for (double h : h_list) levels.emplace_back(h, p.order);
    return convergence_study(p, exact, levels);
}

inline std::string csv_field(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return s;
}

inline std::string convergence_csv(const std::vector<ConvergenceRow>& rows) {
    std::ostringstream o;
    o << "h,order,error,observed_order,converged,iterations,failure\n";
    for (const auto& r : rows)
        o << fmt17(r.h) << ',' << r.order << ',' << fmt17(r.error) << ','
          << (r.observed_order ? fmt17(*r.observed_order) : "n/a") << ',' << (r.converged ? 1 : 0) << ','
          << r.iterations << ',' << csv_field(r.failure) << '\n';
    return o.str();
}

}  // namespace wpt::scheme
