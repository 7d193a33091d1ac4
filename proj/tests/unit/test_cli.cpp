#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "wpt/cli/commands.hpp"
#include "wpt/util/rng.hpp"

using namespace wpt;
using namespace wpt::cli;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("wpt_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

struct CliRun {
    int code = -1;
    std::string out, err;
};

// Runs the CLI binary; stdout and stderr are captured through files.
CliRun run_cli(const std::string& args, const std::string& tag) {
    const fs::path dir = scratch("run_" + tag);
    const std::string cmd = std::string("\"") + WPT_CLI_PATH + "\" " + args + " > \"" + (dir / "out").string() + "\" 2> \"" +
                            (dir / "err").string() + "\"";
    const int status = std::system(cmd.c_str());
    CliRun r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = read_file(dir / "out");
    r.err = read_file(dir / "err");
    return r;
}

fs::path write_ini(const std::string& tag, const std::string& text) {
    const fs::path p = scratch("ini_" + tag) / "c.ini";
    std::ofstream(p) << text;
    return p;
}

const std::string kFull = R"([operator]
kind = weighted
weights = 2 0.5 1

[domain]
shape = annulus
dim = 3
center = 0.1 0 -0.2
r_inner = 0.25
r_outer = 1.5

[grid]
h = 0.1
order = 2

[solver]
backend = spectral
tol = 1e-7
max_iter = 5000
damping = 0.001
sweep = gauss_seidel
threads = 3
init = zero

[rhs]
expr = poly
params = 1.5 2 0 0 -1 0 1 1

[boundary]
expr = sin
params = 1 2 0.5 0.25

[exact]
expr = log_radius
params = 2 0.1 0 -0.2

[experiment]
suite = abp
seed = 18446744073709551615
batch = 7
trials = 100
cap = 0.75
h = 0.125
damping_factor = 2
weights = 1 1 | 2 0 1
strong_max = 1 2 | 2 3
h_list = 0.25 0.125
orders = 1 2

[output]
dir = some/where
formats = csv
)";

}  // namespace

TEST(ParseOperator, AllForms) {
    EXPECT_EQ(parse_operator("weighted(2, 0, 1)"), OperatorSpec::weighted(Weights{2, 0, 1}));
    EXPECT_EQ(parse_operator(" minmax( 1 , 3 )"), OperatorSpec::minmax(1, 3));
    EXPECT_EQ(parse_operator("pucci_plus(0.5, 2)"), OperatorSpec::pucci_plus(0.5, 2));
    EXPECT_EQ(parse_operator("pucci_minus(1, 1)"), OperatorSpec::pucci_minus(1, 1));
    EXPECT_EQ(parse_operator("partial_trace(2, -)"), OperatorSpec::partial_trace(2, Sign::minus));
    for (const auto& op : {OperatorSpec::weighted(Weights{1, 1}), OperatorSpec::minmax(2, 1), OperatorSpec::pucci_plus(1, 2),
                           OperatorSpec::partial_trace(1, Sign::plus)})
        EXPECT_EQ(parse_operator(op.to_string()), op) << op.to_string();
    for (const char* bad : {"weighted()", "minmax(1)", "pucci_plus(2, 1)", "partial_trace(2, *)", "trace(1)", "weighted(1, x)",
                            "weighted(1, 1"})
        EXPECT_THROW(parse_operator(bad), UsageError) << bad;
}

TEST(Config, FullRoundTrip) {
    const Config c = parse_config_text(kFull);
    EXPECT_EQ(c.op, OperatorSpec::weighted(Weights{2, 0.5, 1}));
    EXPECT_EQ(c.experiment.seed, 18446744073709551615ULL);
    ASSERT_EQ(c.experiment.weights.size(), 2u);
    EXPECT_EQ(c.experiment.weights[1], (std::vector<double>{2, 0, 1}));
    EXPECT_EQ(c.experiment.strong_max, (std::vector<std::pair<int, int>>{{1, 2}, {2, 3}}));
    EXPECT_TRUE(c.output.csv);
    EXPECT_FALSE(c.output.snapshot);
    EXPECT_EQ(c.sweep, scheme::Sweep::gauss_seidel);
    const std::string dumped = dump_config(c);
    const Config back = parse_config_text(dumped);
    EXPECT_TRUE(back == c);
    EXPECT_EQ(dump_config(back), dumped);
}

TEST(Config, DefaultsRoundTrip) {
    const Config c = parse_config_text("");
    EXPECT_EQ(c.op, OperatorSpec::weighted(Weights::laplacian(2)));
    EXPECT_TRUE(parse_config_text(dump_config(c)) == c);
}

TEST(Config, RandomRoundTrip) {
    CounterRng rng(77);
    for (int t = 0; t < 40; ++t) {
        Config c;
        const int dim = 2 + t % 2;
        const double r0 = rng.uniform(0.1, 0.5);
        c.domain = t % 3 == 0   ? scheme::DomainSpec::ball(dim, {rng.normal(), rng.normal(), 0}, rng.uniform(0.5, 2))
                   : t % 3 == 1 ? scheme::DomainSpec::annulus(dim, {0, 0, 0}, r0, r0 + rng.uniform(0.2, 1))
                                : scheme::DomainSpec::box(dim, {-rng.uniform(), -1, -1}, {rng.uniform(0.5, 2), 1, 1});
        std::vector<double> w(static_cast<std::size_t>(dim));
        for (auto& x : w) x = rng.uniform(0.0, 3.0);
        w[0] = 0.1 + rng.uniform();
        c.op = t % 4 == 0 ? OperatorSpec::minmax(rng.uniform(), rng.uniform())
             : t % 4 == 1 ? OperatorSpec::partial_trace(1 + t % dim, t % 2 ? Sign::plus : Sign::minus)
             : t % 4 == 2 ? OperatorSpec::pucci_minus(0.5, 0.5 + rng.uniform())
                          : OperatorSpec::weighted(Weights(w));
        c.h = rng.uniform(0.01, 0.2);
        c.tolerance = std::exp(rng.uniform(-25, -5));
        c.boundary = Expression{"affine", {rng.normal(), rng.normal(), rng.normal()}};
        c.experiment.seed = rng.next_u64();
        c.experiment.h_list = {rng.uniform(), rng.uniform()};
        const Config back = parse_config_text(dump_config(c));
        EXPECT_TRUE(back == c) << dump_config(c);
    }
}

TEST(Config, RejectsUnknownAndMalformedInput) {
    const std::vector<std::string> bad{
        "[grid]\nh = 0.1\nspacing = 2\n",               // unknown key
        "[mesh]\nh = 0.1\n",                            // unknown section
        "h = 0.1\n",                                    // outside any section
        "[grid]\nh = 0.1\nh = 0.2\n",                   // duplicate
        "[grid]\nh = -1\n",                             // invalid value
        "[grid]\nh = abc\n",                            // not a number
        "[domain]\nshape = torus\n",                    // unknown shape
        "[operator]\nkind = minmax\nweights = 1 2 3\n",  // arity
        "[operator]\nweights = 1 1 1\n",                // dimension mismatch with the 2D default
        "[rhs]\nexpr = tan\n",                          // unknown expression
        "[rhs]\nparams = 1\n",                          // expr missing
        "[experiment]\nseed = -4\n",
        "[experiment]\nseed = 12x\n",
        "[experiment]\nh_list = 0.1 0.05\norders = 1\n",
        "[solver]\nbackend = multigrid\n",
        "[solver]\nthreads = 0\n",
        "[output]\nformats = csv pdf\n",
    };
    for (const auto& text : bad) EXPECT_THROW(parse_config_text(text), UsageError) << text;
}

TEST(Config, CommentsAndSeparators) {
    const Config c = parse_config_text("# leading comment\n; another\n[experiment]\nweights = 1 1 | 2 0 1\n[output]\nformats =\n");
    EXPECT_EQ(c.experiment.weights.size(), 2u);
    EXPECT_FALSE(c.output.csv);
    EXPECT_FALSE(c.output.snapshot);
}

TEST(Config, OverridesApply) {
    Overrides o;
    o.out = "elsewhere";
    o.seed = 5;
    o.threads = 4;
    o.suite = "holder";
    const Config c = apply(parse_config_text(kFull), o);
    EXPECT_EQ(c.output.dir, "elsewhere");
    EXPECT_EQ(c.experiment.seed, 5u);
    EXPECT_EQ(c.threads, 4);
    EXPECT_EQ(c.experiment.suite, "holder");
    o.threads = 0;
    EXPECT_THROW(apply(Config{}, o), UsageError);
}

TEST(Commands, InlineMatrix) {
    const SymMatrix x = parse_inline_matrix("1,0,0; 0,0,0; 0,0,-1");
    EXPECT_EQ(x.dim(), 3);
    EXPECT_EQ(x(2, 2), -1.0);
    EXPECT_THROW(parse_inline_matrix("1 2 3"), UsageError);
    EXPECT_THROW(parse_inline_matrix("1 2 3 4"), std::invalid_argument);  // not symmetric
}

TEST(Commands, EvalPrintsSpectrumAndValue) {
    std::ostringstream out;
    EXPECT_EQ(cmd_eval(parse_inline_matrix("1,0,0;0,0,0;0,0,-1"), OperatorSpec::minmax(1, 1), out), kPass);
    EXPECT_EQ(out.str(), "eigenvalues: -1 0 1\nvalue: 0\n");
}

TEST(Process, ExitCodes) {
    EXPECT_EQ(run_cli("--help", "help").code, 0);
    EXPECT_EQ(run_cli("", "none").code, 1);
    EXPECT_EQ(run_cli("frobnicate", "unknown").code, 1);
    EXPECT_EQ(run_cli("solve", "noconfig").code, 1);
    EXPECT_EQ(run_cli("solve --config /nonexistent.ini", "missing").code, 1);
    EXPECT_EQ(run_cli("eval --matrix \"1 2 3\"", "badmatrix").code, 1);

    const auto bad = write_ini("bad", "[grid]\nspacing = 1\n");
    const CliRun b = run_cli("solve --config \"" + bad.string() + "\"", "badkey");
    EXPECT_EQ(b.code, 1);
    EXPECT_NE(b.err.find("unknown key 'spacing'"), std::string::npos);

    // Randomized suites refuse to run without a seed.
    const auto abp = write_ini("abp", "[experiment]\nsuite = abp\nh = 0.25\nbatch = 1\ncap = 1e-9\n");
    const CliRun noseed = run_cli("verify --config \"" + abp.string() + "\"", "noseed");
    EXPECT_EQ(noseed.code, 1);
    EXPECT_NE(noseed.err.find("needs a seed"), std::string::npos);
    const auto out = scratch("abp_out");
    EXPECT_EQ(run_cli("verify --config \"" + abp.string() + "\" --seed 3 --out \"" + out.string() + "\"", "abpfail").code, 3);
    EXPECT_TRUE(fs::exists(out / "abp.csv"));

    const auto slow = write_ini("slow", "[domain]\nshape = ball\n[grid]\nh = 0.125\n[solver]\nmax_iter = 2\n"
                                        "[boundary]\nexpr = sin\nparams = 0 3\n[output]\ndir = " + scratch("slow_out").string() + "\n");
    const CliRun nc = run_cli("solve --config \"" + slow.string() + "\"", "nc");
    EXPECT_EQ(nc.code, 2);
    EXPECT_NE(nc.out.find("converged: no"), std::string::npos);
}

TEST(Process, EvalCounterexampleAndIdentity) {
    const CliRun a = run_cli("eval --matrix \"1,0,0;0,0,0;0,0,-1\" --operator \"minmax(1, 1)\"", "x1");
    EXPECT_EQ(a.code, 0);
    EXPECT_NE(a.out.find("value: 0\n"), std::string::npos);
    const CliRun b = run_cli("eval --matrix \"1 0 0 0 1 0 0 0 1\" --operator \"weighted(1, 1, 1)\"", "id");
    EXPECT_EQ(b.code, 0);
    EXPECT_NE(b.out.find("value: 3\n"), std::string::npos);
    const auto csv = scratch("mfile") / "m.csv";
    std::ofstream(csv) << "-1,1,0\n1,0,0\n0,0,0\n";
    const CliRun c = run_cli("eval --matrix-file \"" + csv.string() + "\" --operator \"minmax(1, 1)\"", "mfile");
    EXPECT_EQ(c.code, 0);
    // eigenvalues (-1 - sqrt 5)/2, 0, (-1 + sqrt 5)/2
    ASSERT_NE(c.out.find("value: "), std::string::npos);
    EXPECT_NEAR(std::stod(c.out.substr(c.out.find("value: ") + 7)), -1.0, 1e-15);
}

TEST(Process, SolveWritesArtifactsAndConfigRoundTrips) {
    const auto out = scratch("solve_out");
    const fs::path cfg = fs::path(WPT_CONFIG_DIR) / "solve_laplacian_annulus_2d.ini";
    const CliRun r = run_cli("solve --config \"" + cfg.string() + "\" --out \"" + out.string() + "\"", "solve");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("converged: yes"), std::string::npos);
    EXPECT_TRUE(fs::exists(out / "solution.wptgrid"));
    EXPECT_TRUE(fs::exists(out / "residual.csv"));
    const std::string dumped = read_file(out / "config.ini");
    // Re-running from the dumped config reproduces it byte for byte.
    const auto out2 = scratch("solve_out2");
    const auto again = write_ini("again", dumped);
    ASSERT_EQ(run_cli("solve --config \"" + again.string() + "\" --out \"" + out2.string() + "\"", "solve2").code, 0);
    std::string d2 = read_file(out2 / "config.ini");
    EXPECT_EQ(d2.replace(d2.find(out2.string()), out2.string().size(), out.string()), dumped);
    EXPECT_EQ(read_file(out / "residual.csv"), read_file(out2 / "residual.csv"));
    const auto snap = scheme::read_snapshot((out / "solution.wptgrid").string());
    EXPECT_EQ(snap.values.size(), snap.cls.size());
}

TEST(Process, VerifyCsvIsIndependentOfThreads) {
    const auto cfg = write_ini("props", "[experiment]\nsuite = operator-props\nseed = 9\ntrials = 200\n");
    const auto o1 = scratch("t1"), o4 = scratch("t4");
    ASSERT_EQ(run_cli("verify --config \"" + cfg.string() + "\" --threads 1 --out \"" + o1.string() + "\"", "t1").code, 0);
    ASSERT_EQ(run_cli("verify --config \"" + cfg.string() + "\" --threads 4 --out \"" + o4.string() + "\"", "t4").code, 0);
    EXPECT_EQ(read_file(o1 / "operator-props.csv"), read_file(o4 / "operator-props.csv"));
}

TEST(Process, SampleConfigsParse) {
    std::size_t n = 0;
    for (const auto& e : fs::directory_iterator(WPT_CONFIG_DIR)) {
        if (e.path().extension() != ".ini") continue;
        EXPECT_NO_THROW(load_config(e.path().string())) << e.path();
        ++n;
    }
    EXPECT_GE(n, 10u);
}
