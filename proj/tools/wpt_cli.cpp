#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "wpt/cli/commands.hpp"

using namespace wpt;
using namespace wpt::cli;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wpt: weighted partial trace operators, monotone schemes and estimate checks"};
    app.require_subcommand(1);

    std::string config_path, suite, out_dir, matrix, matrix_file, op_text = "weighted(1, 1)";
    std::uint64_t seed = 0;
    int threads = 1;

    auto* eval = app.add_subcommand("eval", "evaluate an operator on a symmetric matrix");
    auto* m_inline = eval->add_option("--matrix", matrix, "row-major entries, e.g. \"1,0,0; 0,0,0; 0,0,-1\"");
    auto* m_file = eval->add_option("--matrix-file", matrix_file, "CSV file, one row per line");
    m_inline->excludes(m_file);
    eval->add_option("--operator", op_text, "weighted(a1, ..., an) | minmax(a1, an) | pucci_plus(l, L) | "
                                            "pucci_minus(l, L) | partial_trace(k, +|-)")
        ->capture_default_str();

    std::vector<CLI::App*> runs;
    for (const char* name : {"solve", "verify", "convergence"}) {
        auto* sub = app.add_subcommand(name, std::string(name) == "solve"         ? "solve the configured Dirichlet problem"
                                             : std::string(name) == "verify"      ? "run a verification suite"
                                                                                  : "refinement study against an exact solution");
        sub->add_option("--config", config_path, "INI config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (overrides [output] dir)");
        sub->add_option("--seed", seed, "64-bit seed (overrides [experiment] seed)");
        sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
        if (std::string(name) == "verify") sub->add_option("--suite", suite, "suite name");
        runs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kPass : kUsage;
    }

    try {
        if (eval->parsed()) {
            if (matrix.empty() && matrix_file.empty()) throw UsageError("eval needs --matrix or --matrix-file");
            const SymMatrix x = matrix.empty() ? SymMatrix::from_csv(slurp(matrix_file)) : parse_inline_matrix(matrix);
            return cmd_eval(x, parse_operator(op_text), std::cout);
        }
        CLI::App* sub = nullptr;
        for (auto* r : runs)
            if (r->parsed()) sub = r;
        Overrides o;
        if (sub->count("--out")) o.out = out_dir;
        if (sub->count("--seed")) o.seed = seed;
        if (sub->count("--threads")) o.threads = threads;
        if (sub->get_option_no_throw("--suite") && sub->count("--suite")) o.suite = suite;
        const Config c = apply(load_config(config_path), o);
        const std::string name = sub->get_name();
        if (name == "solve") return cmd_solve(c, std::cout, std::cerr);
        if (name == "verify") return cmd_verify(c, std::cout, std::cerr);
        return cmd_convergence(c, std::cout, std::cerr);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNotConverged;
    }
}
