#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "wpt/cli/config.hpp"
#include "wpt/core/sym_matrix.hpp"
#include "wpt/scheme/convergence.hpp"
#include "wpt/scheme/solver.hpp"
#include "wpt/verify/suites.hpp"

namespace wpt::cli {

enum ExitCode : int { kPass = 0, kUsage = 1, kNotConverged = 2, kVerifyFailed = 3 };

/// Command-line overrides applied on top of a config file.
struct Overrides {
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<std::string> suite;
};

inline Config apply(Config c, const Overrides& o) {
    if (o.out) c.output.dir = *o.out;
    if (o.seed) c.experiment.seed = *o.seed;
    if (o.threads) {
        if (*o.threads < 1) throw UsageError("--threads must be >= 1");
        c.threads = *o.threads;
    }
    if (o.suite) c.experiment.suite = *o.suite;
    return c;
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
    out << text;
}

inline std::filesystem::path ensure_dir(const std::string& dir) {
    std::filesystem::path p(dir);
    std::filesystem::create_directories(p);
    return p;
}

/// Row-major entries separated by commas, semicolons or whitespace.
inline SymMatrix parse_inline_matrix(const std::string& text) {
    std::string s = text;
    for (char& ch : s)
        if (ch == ',' || ch == ';') ch = ' ';
    std::vector<double> v;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) v.push_back(parse_double(tok));
    const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(v.size()))));
    if (n < 1 || static_cast<std::size_t>(n * n) != v.size())
        throw UsageError("matrix needs n*n entries, got " + std::to_string(v.size()));
    return SymMatrix::from_entries(n, v);
}

/// Prints ascending eigenvalues and the operator value.
inline int cmd_eval(const SymMatrix& x, const OperatorSpec& op, std::ostream& out) {
    const SmallVector ev = eigenvalues(x);
    out << "eigenvalues:";
    for (int i = 0; i < ev.size(); ++i) out << ' ' << fmt17(ev[i]);
    out << "\nvalue: " << fmt17(eval(op, x)) << '\n';
    return kPass;
}

/// Solves the configured problem; writes solution.wptgrid, residual.csv and
/// config.ini into the output directory.
inline int cmd_solve(const Config& c, std::ostream& out, std::ostream& err) {
    const auto p = c.problem();
    const auto s = scheme::solve(p);
    const auto dir = ensure_dir(c.output.dir);
    if (c.output.snapshot) scheme::write_snapshot(s.u, (dir / "solution.wptgrid").string());
    if (c.output.csv) write_text(dir / "residual.csv", scheme::residual_csv(s));
    write_text(dir / "config.ini", dump_config(c));
    for (const auto& w : s.warnings) err << "warning: " << w << '\n';
    out << "operator: " << c.op.to_string() << "\ndomain: " << c.domain.to_string() << "\nbackend: "
        << scheme::to_string(c.backend) << "\nnodes: " << s.u.count(scheme::NodeClass::interior) << " interior\n"
        << "iterations: " << s.iterations << "\nresidual: " << fmt17(s.final_residual()) << "\ndamping: " << fmt17(s.damping)
        << "\nconverged: " << (s.converged ? "yes" : "no") << '\n';
    if (c.exact) out << "max_error: " << fmt17(scheme::max_interior_error(s.u, c.exact->field())) << '\n';
    if (!s.converged) {
        err << "error: no convergence after " << s.iterations << " iterations (residual " << fmt17(s.final_residual())
            << ", tolerance " << fmt17(s.tolerance) << ")\n";
        return kNotConverged;
    }
    return kPass;
}

/// Runs one suite; writes <suite>.csv. Exit 0 on pass, 3 on failure.
inline int cmd_verify(const Config& c, std::ostream& out, std::ostream& err) {
    const std::string& name = c.experiment.suite;
    if (name.empty()) throw UsageError("verify needs a suite (--suite or [experiment] suite)");
    const auto& names = verify::suite_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) throw UsageError("unknown suite '" + name + "'");
    if (verify::suite_is_randomized(name) && !c.experiment.seed)
        throw UsageError("suite '" + name + "' is randomized and needs a seed (--seed or [experiment] seed)");
    const auto r = verify::run_suite(name, c.suite_options());
    const auto dir = ensure_dir(c.output.dir);
    write_text(dir / (name + ".csv"), r.csv);
    write_text(dir / "config.ini", dump_config(c));
    out << r.summary;
    if (!r.pass) {
        err << "verification failed: " << name << '\n';
        return kVerifyFailed;
    }
    return kPass;
}

/// Refinement study against [exact]; writes convergence.csv.
inline int cmd_convergence(const Config& c, std::ostream& out, std::ostream& err) {
    if (!c.exact) throw UsageError("convergence needs an [exact] section");
    const auto& e = c.experiment;
    if (e.h_list.empty()) throw UsageError("convergence needs [experiment] h_list");
    std::vector<std::pair<double, int>> levels;
    for (std::size_t i = 0; i < e.h_list.size(); ++i) levels.emplace_back(e.h_list[i], e.orders.empty() ? c.order : e.orders[i]);
    const auto rows = scheme::convergence_study(c.problem(), c.exact->field(), levels);
    const auto dir = ensure_dir(c.output.dir);
    const std::string csv = scheme::convergence_csv(rows);
    write_text(dir / "convergence.csv", csv);
    write_text(dir / "config.ini", dump_config(c));
    out << csv;
    for (const auto& r : rows)
        if (!r.converged) {
            err << "error: level h=" << fmt17(r.h) << " did not converge\n";
            return kNotConverged;
        }
    return kPass;
}

}  // namespace wpt::cli
