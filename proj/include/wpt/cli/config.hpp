#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wpt/core/operator.hpp"
#include "wpt/scheme/expression.hpp"
#include "wpt/scheme/solver.hpp"
#include "wpt/util/format.hpp"
#include "wpt/verify/suites.hpp"

namespace wpt::cli {

using scheme::Backend;
using scheme::DomainSpec;

/// Bad config or arguments; maps to exit code 1.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parses "weighted(2, 0, 1)", "minmax(1, 1)", "pucci_plus(1, 2)",
/// "pucci_minus(1, 2)", "partial_trace(2, +)" (the to_string forms).
inline OperatorSpec parse_operator(const std::string& text) {
    const std::string s = trim(text);
    const auto open = s.find('('), close = s.rfind(')');
    if (open == std::string::npos || close != s.size() - 1 || close < open)
        throw UsageError("operator '" + s + "': expected name(args)");
    const std::string name = trim(s.substr(0, open));
    std::vector<std::string> args;
    for (const auto& a : split(s.substr(open + 1, close - open - 1), ',')) args.push_back(trim(a));
    auto nums = [&](std::size_t need) {
        if (need && args.size() != need) throw UsageError(name + " takes " + std::to_string(need) + " arguments");
        std::vector<double> v;
        for (const auto& a : args) v.push_back(parse_double(a));
        return v;
    };
    try {
        if (name == "weighted") return OperatorSpec::weighted(Weights(nums(0)));
        if (name == "minmax") {
            const auto v = nums(2);
            return OperatorSpec::minmax(v[0], v[1]);
        }
        if (name == "pucci_plus" || name == "pucci_minus") {
            const auto v = nums(2);
            return name == "pucci_plus" ? OperatorSpec::pucci_plus(v[0], v[1]) : OperatorSpec::pucci_minus(v[0], v[1]);
        }
        if (name == "partial_trace") {
            if (args.size() != 2 || (args[1] != "+" && args[1] != "-"))
                throw UsageError("partial_trace takes (k, +) or (k, -)");
            return OperatorSpec::partial_trace(parse_int(args[0]), args[1] == "+" ? Sign::plus : Sign::minus);
        }
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    throw UsageError("unknown operator '" + name + "'");
}

struct ExperimentConfig {
    std::string suite;
    std::optional<std::uint64_t> seed;
    int batch = 0;
    long trials = 0;
    std::optional<double> cap;
    std::optional<double> h;
    std::vector<std::vector<double>> weights;
    std::vector<std::pair<int, int>> strong_max;
    std::vector<double> h_list;
    std::vector<int> orders;  // convergence: stencil order per level
    std::optional<double> damping_factor;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

struct OutputConfig {
    std::string dir = "out";
    bool csv = true;
    bool snapshot = true;

    friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

struct Config {
    OperatorSpec op = OperatorSpec::weighted(Weights::laplacian(2));
    DomainSpec domain = DomainSpec::ball(2, {0, 0, 0}, 1.0);
    double h = 0.05;
    int order = 1;
    Backend backend = Backend::monotone;
    std::optional<double> tolerance;
    long max_iterations = 1'000'000;
    std::optional<double> damping;
    scheme::Sweep sweep = scheme::Sweep::jacobi;
    int threads = 1;
    scheme::InitialGuess init = scheme::InitialGuess::boundary_extension;
    Expression rhs{"constant", {0.0}};
    Expression boundary{"constant", {0.0}};
    std::optional<Expression> exact;  // reference solution for convergence studies
    ExperimentConfig experiment;
    OutputConfig output;

    friend bool operator==(const Config& a, const Config& b) {
        return a.op == b.op && a.domain == b.domain && a.h == b.h && a.order == b.order && a.backend == b.backend &&
               a.tolerance == b.tolerance && a.max_iterations == b.max_iterations && a.damping == b.damping &&
               a.sweep == b.sweep && a.threads == b.threads && a.init == b.init && a.rhs == b.rhs &&
               a.boundary == b.boundary && a.exact == b.exact && a.experiment == b.experiment && a.output == b.output;
    }

    scheme::Problem problem() const {
        return {.domain = domain, .op = op, .f = rhs.field(), .g = boundary.field(), .backend = backend, .h = h,
                .order = order, .tolerance = tolerance, .max_iterations = max_iterations, .damping = damping,
                .sweep = sweep, .threads = threads, .init = init};
    }

    verify::SuiteOptions suite_options() const {
        verify::SuiteOptions o;
        if (experiment.seed) o.seed = *experiment.seed;
        o.batch = experiment.batch;
        o.trials = experiment.trials;
        o.threads = threads;
        o.cap = experiment.cap;
        o.h = experiment.h;
        o.weights = experiment.weights;
        o.strong_max = experiment.strong_max;
        o.h_list = experiment.h_list;
        o.damping_factor = experiment.damping_factor;
        return o;
    }
};

namespace detail {

inline const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> k{
        {"operator", {"kind", "weights", "ellipticity", "k", "sign"}},
        {"domain", {"shape", "dim", "center", "radius", "r_inner", "r_outer", "lower", "upper"}},
        {"grid", {"h", "order"}},
        {"solver", {"backend", "tol", "max_iter", "damping", "sweep", "threads", "init"}},
        {"rhs", {"expr", "params"}},
        {"boundary", {"expr", "params"}},
        {"exact", {"expr", "params"}},
        {"experiment",
         {"suite", "seed", "batch", "trials", "cap", "h", "weights", "strong_max", "h_list", "orders", "damping_factor"}},
        {"output", {"dir", "formats"}},
    };
    return k;
}

using Table = std::map<std::string, std::map<std::string, std::string>>;

inline Table read_table(std::istream& in) {
    std::vector<CLI::ConfigItem> items;
    try {
        items = CLI::ConfigINI().from_config(in);
    } catch (const CLI::Error& e) {
        throw UsageError(std::string("config: ") + e.what());
    }
    Table t;
    for (const auto& it : items) {
        if (it.name == "++" || it.name == "--") continue;
        if (it.parents.size() != 1) throw UsageError("config: key '" + it.name + "' must be inside a [section]");
        const std::string& sec = it.parents.front();
        const auto s = schema().find(sec);
        if (s == schema().end()) throw UsageError("config: unknown section [" + sec + "]");
        if (!s->second.count(it.name)) throw UsageError("config: unknown key '" + it.name + "' in [" + sec + "]");
        std::string v;
        for (std::size_t i = 0; i < it.inputs.size(); ++i) v += (i ? " " : "") + it.inputs[i];
        if (!t[sec].emplace(it.name, v).second) throw UsageError("config: duplicate key '" + it.name + "' in [" + sec + "]");
    }
    return t;
}

inline std::vector<double> doubles(const std::string& s) {
    std::vector<double> v;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok)
        for (const auto& part : split(tok, ','))
            if (!trim(part).empty()) v.push_back(parse_double(trim(part)));
    return v;
}

inline Point point3(const std::string& s, const std::string& what) {
    const auto v = doubles(s);
    if (v.empty() || v.size() > 3) throw UsageError("config: " + what + " needs 1 to 3 coordinates");
    Point p{0, 0, 0};
    for (std::size_t i = 0; i < v.size(); ++i) p[i] = v[i];
    return p;
}

inline std::string point_str(const Point& p, int dim) {
    return join_doubles(std::vector<double>(p.begin(), p.begin() + dim), " ");
}

inline Expression expression(const std::map<std::string, std::string>& sec, const std::string& name) {
    const auto e = sec.find("expr");
    if (e == sec.end()) throw UsageError("config: [" + name + "] needs expr");
    const auto p = sec.find("params");
    Expression x{e->second, p == sec.end() ? std::vector<double>{} : doubles(p->second)};
    if (std::find(Expression::names().begin(), Expression::names().end(), x.name) == Expression::names().end())
        throw UsageError("config: unknown expression '" + x.name + "' in [" + name + "]");
    x.validate();
    return x;
}

}  // namespace detail

/// Parses the INI text. Every failure (syntax, unknown key, invalid value)
/// is a UsageError.
inline Config parse_config(std::istream& in) {
    const detail::Table t = detail::read_table(in);
    Config c;
    auto sec = [&](const std::string& name) -> const std::map<std::string, std::string>* {
        const auto it = t.find(name);
        return it == t.end() ? nullptr : &it->second;
    };
    auto get = [&](const std::string& s, const std::string& k) -> std::optional<std::string> {
        const auto* m = sec(s);
        if (!m) return std::nullopt;
        const auto it = m->find(k);
        if (it == m->end()) return std::nullopt;
        return it->second;
    };
    auto num = [&](const std::string& s, const std::string& k) -> std::optional<double> {
        const auto v = get(s, k);
        return v ? std::optional<double>(parse_double(*v)) : std::nullopt;
    };
    auto integer = [&](const std::string& s, const std::string& k) -> std::optional<long> {
        const auto v = get(s, k);
        return v ? std::optional<long>(parse_int(*v)) : std::nullopt;
    };

    try {
        int dim = static_cast<int>(integer("domain", "dim").value_or(2));
        const std::string shape = get("domain", "shape").value_or("ball");
        if (shape == "ball") {
            c.domain = DomainSpec::ball(dim, detail::point3(get("domain", "center").value_or("0"), "center"),
                                        num("domain", "radius").value_or(1.0));
        } else if (shape == "annulus") {
            c.domain = DomainSpec::annulus(dim, detail::point3(get("domain", "center").value_or("0"), "center"),
                                           num("domain", "r_inner").value_or(0.5), num("domain", "r_outer").value_or(1.0));
        } else if (shape == "box") {
            c.domain = DomainSpec::box(dim, detail::point3(get("domain", "lower").value_or("0 0 0"), "lower"),
                                       detail::point3(get("domain", "upper").value_or("1 1 1"), "upper"));
        } else if (shape == "cube") {
            c.domain = DomainSpec::unit_cube(dim);
        } else {
            throw UsageError("config: unknown domain shape '" + shape + "'");
        }

        const std::string kind = get("operator", "kind").value_or("weighted");
        const auto weights = get("operator", "weights");
        if (kind == "weighted") {
            c.op = OperatorSpec::weighted(weights ? Weights(detail::doubles(*weights)) : Weights::laplacian(dim));
        } else if (kind == "minmax") {
            const auto v = weights ? detail::doubles(*weights) : std::vector<double>{1.0, 1.0};
            if (v.size() != 2) throw UsageError("config: minmax weights are 'a1 an'");
            c.op = OperatorSpec::minmax(v[0], v[1]);
        } else if (kind == "pucci_plus" || kind == "pucci_minus") {
            const auto e = get("operator", "ellipticity");
            const auto v = e ? detail::doubles(*e) : std::vector<double>{1.0, 1.0};
            if (v.size() != 2) throw UsageError("config: ellipticity is 'lambda Lambda'");
            c.op = kind == "pucci_plus" ? OperatorSpec::pucci_plus(v[0], v[1]) : OperatorSpec::pucci_minus(v[0], v[1]);
        } else if (kind == "partial_trace") {
            const std::string sign = get("operator", "sign").value_or("plus");
            if (sign != "plus" && sign != "minus") throw UsageError("config: sign must be plus or minus");
            c.op = OperatorSpec::partial_trace(static_cast<int>(integer("operator", "k").value_or(1)),
                                               sign == "plus" ? Sign::plus : Sign::minus);
        } else {
            throw UsageError("config: unknown operator kind '" + kind + "'");
        }
        if (const auto w = c.op.as_weights(dim); !w && !c.op.get_if<op::PucciPlus>() && !c.op.get_if<op::PucciMinus>())
            throw UsageError("config: operator does not fit dimension " + std::to_string(dim));

        c.h = num("grid", "h").value_or(c.h);
        c.order = static_cast<int>(integer("grid", "order").value_or(c.order));
        if (!(c.h > 0.0)) throw UsageError("config: h must be positive");
        if (c.order < 1) throw UsageError("config: order must be >= 1");

        if (const auto b = get("solver", "backend")) c.backend = scheme::parse_backend(*b);
        c.tolerance = num("solver", "tol");
        c.max_iterations = integer("solver", "max_iter").value_or(c.max_iterations);
        c.damping = num("solver", "damping");
        if (const auto s = get("solver", "sweep")) c.sweep = scheme::parse_sweep(*s);
        c.threads = static_cast<int>(integer("solver", "threads").value_or(1));
        if (const auto s = get("solver", "init")) c.init = scheme::parse_initial_guess(*s);
        if (c.tolerance && !(*c.tolerance > 0.0)) throw UsageError("config: tol must be positive");
        if (c.max_iterations < 1) throw UsageError("config: max_iter must be >= 1");
        if (c.damping && !(*c.damping > 0.0)) throw UsageError("config: damping must be positive");
        if (c.threads < 1) throw UsageError("config: threads must be >= 1");

        if (const auto* s = sec("rhs")) c.rhs = detail::expression(*s, "rhs");
        if (const auto* s = sec("boundary")) c.boundary = detail::expression(*s, "boundary");
        if (const auto* s = sec("exact")) c.exact = detail::expression(*s, "exact");

        auto& e = c.experiment;
        e.suite = get("experiment", "suite").value_or("");
        if (const auto s = get("experiment", "seed")) {
            std::size_t used = 0;
            const std::string v = trim(*s);
            if (v.empty() || v[0] == '-') throw UsageError("config: seed must be an unsigned 64-bit integer");
            e.seed = std::stoull(v, &used);
            if (used != v.size()) throw UsageError("config: seed must be an unsigned 64-bit integer");
        }
        e.batch = static_cast<int>(integer("experiment", "batch").value_or(0));
        e.trials = integer("experiment", "trials").value_or(0);
        e.cap = num("experiment", "cap");
        e.h = num("experiment", "h");
        e.damping_factor = num("experiment", "damping_factor");
        if (const auto w = get("experiment", "weights"))
            for (const auto& group : split(*w, '|'))
                if (!trim(group).empty()) e.weights.push_back(detail::doubles(group));
        if (const auto w = get("experiment", "strong_max"))
            for (const auto& group : split(*w, '|')) {
                if (trim(group).empty()) continue;
                const auto v = detail::doubles(group);
                if (v.size() != 2) throw UsageError("config: strong_max cases are 'k n | k n | ...'");
                e.strong_max.emplace_back(static_cast<int>(v[0]), static_cast<int>(v[1]));
            }
        if (const auto v = get("experiment", "h_list")) e.h_list = detail::doubles(*v);
        if (const auto v = get("experiment", "orders"))
            for (double d : detail::doubles(*v)) e.orders.push_back(static_cast<int>(d));
        if (!e.orders.empty() && e.orders.size() != e.h_list.size())
            throw UsageError("config: orders must match h_list in length");
        if (e.batch < 0 || e.trials < 0) throw UsageError("config: batch and trials must be >= 0");

        c.output.dir = get("output", "dir").value_or(c.output.dir);
        if (const auto f = get("output", "formats")) {
            c.output.csv = c.output.snapshot = false;
            for (const auto& tok : split(*f, ' ')) {
                const std::string x = trim(tok);
                if (x == "csv") c.output.csv = true;
                else if (x == "snapshot") c.output.snapshot = true;
                else if (!x.empty()) throw UsageError("config: unknown output format '" + x + "'");
            }
        }
    } catch (const UsageError&) {
        throw;
    } catch (const std::exception& ex) {
        throw UsageError(std::string("config: ") + ex.what());
    }
    return c;
}

inline Config parse_config_text(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

inline Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config '" + path + "'");
    return parse_config(in);
}

/// Effective configuration as INI; parse_config(dump_config(c)) == c.
inline std::string dump_config(const Config& c) {
    std::ostringstream o;
    const int dim = c.domain.dim();
    o << "[operator]\n";
    if (const auto* w = c.op.get_if<op::Weighted>()) {
        o << "kind = weighted\nweights = " << join_doubles(std::vector<double>(w->w.values().begin(), w->w.values().end()), " ") << '\n';
    } else if (const auto* m = c.op.get_if<op::MinMax>()) {
        o << "kind = minmax\nweights = " << fmt17(m->a1) << ' ' << fmt17(m->an) << '\n';
    } else if (const auto* p = c.op.get_if<op::PucciPlus>()) {
        o << "kind = pucci_plus\nellipticity = " << fmt17(p->lambda) << ' ' << fmt17(p->Lambda) << '\n';
    } else if (const auto* p = c.op.get_if<op::PucciMinus>()) {
        o << "kind = pucci_minus\nellipticity = " << fmt17(p->lambda) << ' ' << fmt17(p->Lambda) << '\n';
    } else if (const auto* p = c.op.get_if<op::PartialTrace>()) {
        o << "kind = partial_trace\nk = " << p->k << "\nsign = " << (p->sign == Sign::plus ? "plus" : "minus") << '\n';
    }
    o << "\n[domain]\ndim = " << dim << '\n';
    if (const auto* b = c.domain.get_if<scheme::shape::Box>())
        o << "shape = box\nlower = " << detail::point_str(b->lower, dim) << "\nupper = " << detail::point_str(b->upper, dim) << '\n';
    else if (const auto* b = c.domain.get_if<scheme::shape::Ball>())
        o << "shape = ball\ncenter = " << detail::point_str(b->center, dim) << "\nradius = " << fmt17(b->radius) << '\n';
    else if (const auto* a = c.domain.get_if<scheme::shape::Annulus>())
        o << "shape = annulus\ncenter = " << detail::point_str(a->center, dim) << "\nr_inner = " << fmt17(a->r_inner)
          << "\nr_outer = " << fmt17(a->r_outer) << '\n';
    o << "\n[grid]\nh = " << fmt17(c.h) << "\norder = " << c.order << '\n';
    o << "\n[solver]\nbackend = " << scheme::to_string(c.backend) << '\n';
    if (c.tolerance) o << "tol = " << fmt17(*c.tolerance) << '\n';
    o << "max_iter = " << c.max_iterations << '\n';
    if (c.damping) o << "damping = " << fmt17(*c.damping) << '\n';
    o << "sweep = " << scheme::to_string(c.sweep) << "\nthreads = " << c.threads << "\ninit = " << scheme::to_string(c.init)
      << '\n';
    auto expr = [&](const char* name, const Expression& e) {
        o << "\n[" << name << "]\nexpr = " << e.name << '\n';
        if (!e.params.empty()) o << "params = " << join_doubles(e.params, " ") << '\n';
    };
    expr("rhs", c.rhs);
    expr("boundary", c.boundary);
    if (c.exact) expr("exact", *c.exact);
    const auto& e = c.experiment;
    o << "\n[experiment]\n";
    if (!e.suite.empty()) o << "suite = " << e.suite << '\n';
    if (e.seed) o << "seed = " << *e.seed << '\n';
    if (e.batch) o << "batch = " << e.batch << '\n';
    if (e.trials) o << "trials = " << e.trials << '\n';
    if (e.cap) o << "cap = " << fmt17(*e.cap) << '\n';
    if (e.h) o << "h = " << fmt17(*e.h) << '\n';
    if (e.damping_factor) o << "damping_factor = " << fmt17(*e.damping_factor) << '\n';
    if (!e.weights.empty()) {
        o << "weights = ";
        for (std::size_t i = 0; i < e.weights.size(); ++i) o << (i ? " | " : "") << join_doubles(e.weights[i], " ");
        o << '\n';
    }
    if (!e.strong_max.empty()) {
        o << "strong_max = ";
        for (std::size_t i = 0; i < e.strong_max.size(); ++i)
            o << (i ? " | " : "") << e.strong_max[i].first << ' ' << e.strong_max[i].second;
        o << '\n';
    }
    if (!e.h_list.empty()) o << "h_list = " << join_doubles(e.h_list, " ") << '\n';
    if (!e.orders.empty()) {
        o << "orders =";
        for (int p : e.orders) o << ' ' << p;
        o << '\n';
    }
    o << "\n[output]\ndir = " << c.output.dir << "\nformats =";
    if (c.output.csv) o << " csv";
    if (c.output.snapshot) o << " snapshot";
    o << '\n';
    return o.str();
}

}  // namespace wpt::cli
