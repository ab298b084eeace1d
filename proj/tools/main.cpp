// Command-line front end: estimate density functionals from samples, print
// ground-truth values, run convergence sweeps, and run the distributional
// theory checks. Exit codes: 0 success, 1 validation/parse error, 2 a check
// ran but failed.
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "fixedk/distributions.hpp"
#include "fixedk/errors.hpp"
#include "fixedk/estimators.hpp"
#include "fixedk/io.hpp"
#include "fixedk/metric.hpp"
#include "fixedk/rng.hpp"
#include "fixedk/sample_set.hpp"
#include "fixedk/sweep.hpp"
#include "fixedk/theory_checks.hpp"

namespace {

using namespace fixedk;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitCheckFailed = 2;

double parse_order(const std::string& text) {
    if (text == "inf") {
        return kSupNorm;
    }
    std::size_t pos = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &pos);
    } catch (const std::exception&) {
        pos = std::string::npos;
    }
    if (pos != text.size()) {
        throw parameter_error("--r must be 1, 2, inf, or a real number >= 1");
    }
    return value;
}

// Builds the functional from the CLI flags. The plug-in baseline defaults to
// the log map; with --alpha it uses the power map with exponent alpha - 1, the
// uncorrected counterpart of the Renyi functional.
FunctionalSpec make_functional(const std::string& name, const std::optional<double>& alpha) {
    if (name == "shannon" || name == "kl") {
        if (alpha) {
            throw parameter_error("--alpha is not accepted for --functional " + name);
        }
        return name == "shannon" ? FunctionalSpec::shannon() : FunctionalSpec::kl();
    }
    if (name == "renyi" || name == "alpha-div") {
        if (!alpha) {
            throw parameter_error("--functional " + name + " requires --alpha");
        }
        return name == "renyi" ? FunctionalSpec::renyi(*alpha)
                               : FunctionalSpec::alpha_divergence(*alpha);
    }
    if (name == "plugin") {
        return alpha ? FunctionalSpec::plug_in_power(*alpha - 1.0)
                     : FunctionalSpec::plug_in_log();
    }
    throw parameter_error("unknown functional '" + name + "'");
}

Format parse_format(const std::string& text) {
    return text == "csv" ? Format::csv : Format::json;
}

// Renders through a string buffer so stdout and --out receive identical bytes.
void deliver(const std::string& out_path, const std::string& bytes) {
    if (out_path.empty()) {
        std::cout << bytes;
        std::cout.flush();
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        throw parse_error("cannot open output file '" + out_path + "'");
    }
    out << bytes;
}

template <typename Result>
void deliver_emitted(const std::string& out_path, const Result& result, Format format) {
    std::ostringstream buffer;
    emit(buffer, result, format);
    deliver(out_path, buffer.str());
}

struct EstimateOptions {
    std::string functional = "shannon";
    std::optional<double> alpha;
    int k = 1;
    std::string order = "2";
    std::optional<std::string> dist;
    std::optional<std::string> dist_q;
    std::optional<std::string> input;
    std::optional<std::string> input_q;
    std::optional<int> dim;
    std::size_t n = 1024;
    std::optional<std::size_t> m;
    std::uint64_t seed = 1;
    bool allow_outside = false;
    std::string format = "json";
    std::string out_path;
};

SampleSet load_one_sample_set(const std::optional<std::string>& dist,
                              const std::optional<std::string>& input, std::size_t n,
                              std::uint64_t seed, const std::optional<int>& dim,
                              double order, bool allow_outside, const char* which) {
    if (dist && input) {
        throw parameter_error(std::string("give either --dist or --input for ") + which +
                              ", not both");
    }
    if (dist) {
        const DistributionSpec spec = parse_distribution_spec(*dist);
        if (dim && *dim != spec.dimension()) {
            throw dimension_error("--dim disagrees with the distribution dimension");
        }
        return sample(spec, n, seed, MetricConfig{spec.dimension(), order});
    }
    if (input) {
        if (!dim) {
            throw parameter_error("--input requires --dim");
        }
        return load_samples(*input, *dim, MetricConfig{*dim, order}, allow_outside);
    }
    throw parameter_error(std::string("no data source for ") + which +
                          ": pass --dist or --input");
}

int run_estimate(const EstimateOptions& opt) {
    const FunctionalSpec spec = make_functional(opt.functional, opt.alpha);
    const double order = parse_order(opt.order);
    const SampleSet data_p =
        load_one_sample_set(opt.dist, opt.input, opt.n, derive_seed(opt.seed, 0), opt.dim,
                            order, opt.allow_outside, "P");

    Estimate estimate;
    if (spec.is_divergence()) {
        const std::size_t m = opt.m.value_or(opt.n);
        const SampleSet data_q =
            load_one_sample_set(opt.dist_q, opt.input_q, m, derive_seed(opt.seed, 1),
                                std::optional<int>(data_p.dimension()), order,
                                opt.allow_outside, "Q");
        if (spec.kind == FunctionalKind::kl_divergence) {
            estimate = kl_divergence(data_p, data_q, opt.k);
        } else {
            estimate = alpha_divergence_functional(data_p, data_q, opt.k, *spec.alpha);
        }
    } else {
        if (opt.dist_q || opt.input_q) {
            throw parameter_error("--dist-q/--input-q are only valid for divergences");
        }
        switch (spec.kind) {
            case FunctionalKind::shannon_entropy:
                estimate = shannon_entropy(data_p, opt.k);
                break;
            case FunctionalKind::renyi_functional:
                estimate = renyi_functional(data_p, opt.k, *spec.alpha);
                break;
            default:
                estimate = plug_in(data_p, opt.k, spec);
                break;
        }
    }
    deliver_emitted(opt.out_path, estimate, parse_format(opt.format));
    return kExitOk;
}

struct TruthOptions {
    std::string functional = "shannon";
    std::optional<double> alpha;
    std::string dist;
    std::optional<std::string> dist_q;
    std::optional<std::string> method;
    std::string format = "json";
    std::string out_path;
};

int run_truth(const TruthOptions& opt) {
    const FunctionalSpec spec = make_functional(opt.functional, opt.alpha);
    const DistributionSpec p = parse_distribution_spec(opt.dist);
    std::optional<DistributionSpec> q;
    if (opt.dist_q) {
        q = parse_distribution_spec(*opt.dist_q);
    }
    std::optional<TruthMethod> force;
    if (opt.method) {
        if (*opt.method == "closed-form") {
            force = TruthMethod::closed_form;
        } else if (*opt.method == "quadrature") {
            force = TruthMethod::quadrature;
        } else {
            throw parameter_error("--method must be closed-form or quadrature");
        }
    }
    const GroundTruthValue truth = true_functional(p, q, spec, force);
    deliver_emitted(opt.out_path, truth, parse_format(opt.format));
    return kExitOk;
}

struct SweepOptions {
    std::string functional = "shannon";
    std::optional<double> alpha;
    std::string dist;
    std::optional<std::string> dist_q;
    std::vector<int> ks{1};
    std::string order = "2";
    std::vector<std::size_t> n_grid;
    int trials = 64;
    std::uint64_t seed = 1;
    std::optional<double> expected_beta;
    std::string format = "json";
    std::string out_path;
};

int run_sweep_command(const SweepOptions& opt) {
    SweepConfig config;
    config.functional = make_functional(opt.functional, opt.alpha);
    config.dist_p = parse_distribution_spec(opt.dist);
    if (opt.dist_q) {
        config.dist_q = parse_distribution_spec(*opt.dist_q);
    }
    config.ks = opt.ks;
    config.metric = MetricConfig{config.dist_p.dimension(), parse_order(opt.order)};
    config.n_grid = opt.n_grid;
    config.trials = opt.trials;
    config.master_seed = opt.seed;
    config.expected_beta = opt.expected_beta;
    const SweepResult result = run_sweep(config);
    deliver_emitted(opt.out_path, result, parse_format(opt.format));
    return kExitOk;
}

struct ConcentrationOptions {
    int n = 100;
    int k = 1;
    int dim = 1;
    int trials = 5000;
    std::uint64_t seed = 1;
    std::vector<double> radii;  // empty = default grid
    std::string format = "json";
    std::string out_path;
};

int run_check_concentration(const ConcentrationOptions& opt) {
    const std::vector<double> radii =
        opt.radii.empty() ? default_concentration_radii(opt.n, opt.k, opt.dim) : opt.radii;
    const ConcentrationReport report =
        concentration_check(opt.n, opt.k, opt.dim, radii, opt.trials, opt.seed);
    deliver_emitted(opt.out_path, report, parse_format(opt.format));
    return report.all_pass() ? kExitOk : kExitCheckFailed;
}

struct ErlangOptions {
    int n = 4096;
    int k = 1;
    int dim = 2;
    int trials = 2000;
    std::uint64_t seed = 1;
    std::vector<double> query;  // empty = cube center
    double ks_threshold = 0.05;
    std::string format = "json";
    std::string out_path;
};

int run_check_erlang(const ErlangOptions& opt) {
    const ErlangReport report = erlang_check(opt.n, opt.k, opt.dim, opt.trials, opt.seed,
                                             std::span<const double>(opt.query));
    deliver_emitted(opt.out_path, report, parse_format(opt.format));
    return report.ks_statistic < opt.ks_threshold ? kExitOk : kExitCheckFailed;
}

struct MomentOptions {
    int n = 100;
    int k = 1;
    int dim = 1;
    double alpha = 1.0;
    int trials = 5000;
    std::uint64_t seed = 1;
    std::string format = "json";
    std::string out_path;
};

int run_check_moments(const MomentOptions& opt) {
    const MomentBoundReport report =
        moment_bound_check(opt.n, opt.k, opt.dim, opt.alpha, opt.trials, opt.seed);
    deliver_emitted(opt.out_path, report, parse_format(opt.format));
    return report.pass ? kExitOk : kExitCheckFailed;
}

// Exact hand-checkable cases: tiny point sets where every neighbor distance
// can be read off directly and the corrected estimate has a closed form.
int run_selftest() {
    const MetricConfig line{1, 2.0};
    struct Case {
        const char* name;
        double expected;
        double got;
    };
    std::vector<Case> cases;

    {
        const SampleSet data = SampleSet::from_points(line, {{0.25}, {0.75}});
        cases.push_back({"shannon {0.25,0.75} k=1", 1.0, shannon_entropy(data, 1).value});
    }
    {
        const SampleSet data = SampleSet::from_points(line, {{0.2}, {0.5}, {0.8}});
        cases.push_back({"renyi alpha=2 {0.2,0.5,0.8} k=2", 20.0 / 27.0,
                         renyi_functional(data, 2, 2.0).value});
    }
    {
        const SampleSet p = SampleSet::from_points(line, {{0.3}, {0.7}});
        const SampleSet q = SampleSet::from_points(line, {{0.2}, {0.6}});
        cases.push_back(
            {"kl {0.3,0.7}||{0.2,0.6} k=1", -std::log(2.0), kl_divergence(p, q, 1).value});
        cases.push_back({"alpha-div alpha=0.5 same pair k=1", 4.0 / std::acos(-1.0),
                         alpha_divergence_functional(p, q, 1, 0.5).value});
    }

    constexpr double kTolerance = 1e-12;
    bool all_pass = true;
    for (const Case& c : cases) {
        const double diff = std::abs(c.got - c.expected);
        const bool pass = diff <= kTolerance;
        all_pass = all_pass && pass;
        char buffer[160];
        std::snprintf(buffer, sizeof(buffer), "%s  %s: expected %.17g, got %.17g, |diff| %.3g\n",
                      pass ? "PASS" : "FAIL", c.name, c.expected, c.got, diff);
        std::cout << buffer;
    }
    return all_pass ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bias-corrected fixed-k nearest-neighbor estimators of density functionals"};
    app.require_subcommand(1);

    int threads = 0;
    app.add_option("--threads", threads, "Worker thread limit (0 = library default)");

    // Callbacks only select the work; it runs after parsing so global options
    // like --threads are in force first.
    std::function<int()> runner;

    EstimateOptions est;
    CLI::App* estimate_cmd =
        app.add_subcommand("estimate", "Estimate a functional from samples");
    estimate_cmd->fallthrough();
    estimate_cmd->add_option("--functional", est.functional, "shannon|renyi|kl|alpha-div|plugin")
        ->check(CLI::IsMember({"shannon", "renyi", "kl", "alpha-div", "plugin"}));
    estimate_cmd->add_option("--alpha", est.alpha, "Order parameter (renyi/alpha-div/plugin)");
    estimate_cmd->add_option("--k", est.k, "Neighbor order (default 1)");
    estimate_cmd->add_option("--r", est.order, "Minkowski norm order: 1|2|inf|F");
    estimate_cmd->add_option("--dist", est.dist, "Sampling distribution spec for P");
    estimate_cmd->add_option("--dist-q", est.dist_q, "Sampling distribution spec for Q");
    estimate_cmd->add_option("--input", est.input, "CSV sample file for P");
    estimate_cmd->add_option("--input-q", est.input_q, "CSV sample file for Q");
    estimate_cmd->add_option("--dim", est.dim, "Point dimension (required with --input)");
    estimate_cmd->add_option("--n", est.n, "Sample count for --dist (default 1024)");
    estimate_cmd->add_option("--m", est.m, "Q sample count for --dist-q (default = --n)");
    estimate_cmd->add_option("--seed", est.seed, "Sampling seed");
    estimate_cmd->add_flag("--allow-outside", est.allow_outside,
                           "Accept file coordinates outside [0,1]");
    estimate_cmd->add_option("--format", est.format)->check(CLI::IsMember({"json", "csv"}));
    estimate_cmd->add_option("--out", est.out_path, "Output path (default stdout)");
    estimate_cmd->callback([&] { runner = [&] { return run_estimate(est); }; });

    TruthOptions tru;
    CLI::App* truth_cmd =
        app.add_subcommand("truth", "Ground-truth functional value for product-Beta densities");
    truth_cmd->fallthrough();
    truth_cmd->add_option("--functional", tru.functional, "shannon|renyi|kl|alpha-div|plugin")
        ->check(CLI::IsMember({"shannon", "renyi", "kl", "alpha-div", "plugin"}));
    truth_cmd->add_option("--alpha", tru.alpha, "Order parameter");
    truth_cmd->add_option("--dist", tru.dist, "Distribution spec for P")->required();
    truth_cmd->add_option("--dist-q", tru.dist_q, "Distribution spec for Q");
    truth_cmd->add_option("--method", tru.method, "closed-form|quadrature (default: auto)");
    truth_cmd->add_option("--format", tru.format)->check(CLI::IsMember({"json", "csv"}));
    truth_cmd->add_option("--out", tru.out_path, "Output path (default stdout)");
    truth_cmd->callback([&] { runner = [&] { return run_truth(tru); }; });

    SweepOptions swp;
    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "Monte Carlo bias/variance/MSE convergence sweep");
    sweep_cmd->fallthrough();
    sweep_cmd->add_option("--functional", swp.functional, "shannon|renyi|kl|alpha-div|plugin")
        ->check(CLI::IsMember({"shannon", "renyi", "kl", "alpha-div", "plugin"}));
    sweep_cmd->add_option("--alpha", swp.alpha, "Order parameter");
    sweep_cmd->add_option("--dist", swp.dist, "Distribution spec for P")->required();
    sweep_cmd->add_option("--dist-q", swp.dist_q, "Distribution spec for Q");
    sweep_cmd->add_option("--k", swp.ks, "Neighbor orders (comma separated)")->delimiter(',');
    sweep_cmd->add_option("--r", swp.order, "Minkowski norm order: 1|2|inf|F");
    sweep_cmd->add_option("--n-grid", swp.n_grid, "Sample sizes, comma separated")
        ->delimiter(',')
        ->required();
    sweep_cmd->add_option("--trials", swp.trials, "Trials per grid point (default 64)");
    sweep_cmd->add_option("--seed", swp.seed, "Master seed");
    sweep_cmd->add_option("--expected-beta", swp.expected_beta,
                          "Density smoothness exponent in (0,2], recorded in the report");
    sweep_cmd->add_option("--format", swp.format)->check(CLI::IsMember({"json", "csv"}));
    sweep_cmd->add_option("--out", swp.out_path, "Output path (default stdout)");
    sweep_cmd->callback([&] { runner = [&] { return run_sweep_command(swp); }; });

    CLI::App* check_cmd = app.add_subcommand("check", "Distributional theory checks");
    check_cmd->require_subcommand(1);
    check_cmd->fallthrough();

    ConcentrationOptions conc;
    CLI::App* conc_cmd = check_cmd->add_subcommand(
        "concentration", "Tail bounds for the k-th neighbor distance at the cube center");
    conc_cmd->fallthrough();
    conc_cmd->add_option("--n", conc.n, "Sample count per trial");
    conc_cmd->add_option("--k", conc.k, "Neighbor order");
    conc_cmd->add_option("--dim", conc.dim, "Dimension");
    conc_cmd->add_option("--trials", conc.trials, "Monte Carlo trials (>= 1000)");
    conc_cmd->add_option("--seed", conc.seed, "Seed");
    conc_cmd->add_option("--radii", conc.radii, "Radii to test (default: auto grid)")
        ->delimiter(',');
    conc_cmd->add_option("--format", conc.format)->check(CLI::IsMember({"json", "csv"}));
    conc_cmd->add_option("--out", conc.out_path, "Output path (default stdout)");
    conc_cmd->callback([&] { runner = [&] { return run_check_concentration(conc); }; });

    ErlangOptions erl;
    CLI::App* erl_cmd = check_cmd->add_subcommand(
        "erlang", "Erlang limit of the normalized k-th neighbor ball measure");
    erl_cmd->fallthrough();
    erl_cmd->add_option("--n", erl.n, "Sample count per trial");
    erl_cmd->add_option("--k", erl.k, "Neighbor order");
    erl_cmd->add_option("--dim", erl.dim, "Dimension");
    erl_cmd->add_option("--trials", erl.trials, "Monte Carlo trials");
    erl_cmd->add_option("--seed", erl.seed, "Seed");
    erl_cmd->add_option("--query", erl.query, "Query point coordinates (default: center)")
        ->delimiter(',');
    erl_cmd->add_option("--ks-threshold", erl.ks_threshold,
                        "KS statistic pass threshold (default 0.05)");
    erl_cmd->add_option("--format", erl.format)->check(CLI::IsMember({"json", "csv"}));
    erl_cmd->add_option("--out", erl.out_path, "Output path (default stdout)");
    erl_cmd->callback([&] { runner = [&] { return run_check_erlang(erl); }; });

    MomentOptions mom;
    CLI::App* mom_cmd = check_cmd->add_subcommand(
        "moments", "Moment bounds for the k-th neighbor distance at the cube center");
    mom_cmd->fallthrough();
    mom_cmd->add_option("--n", mom.n, "Sample count per trial");
    mom_cmd->add_option("--k", mom.k, "Neighbor order");
    mom_cmd->add_option("--dim", mom.dim, "Dimension");
    mom_cmd->add_option("--alpha", mom.alpha, "Moment order (nonzero)");
    mom_cmd->add_option("--trials", mom.trials, "Monte Carlo trials");
    mom_cmd->add_option("--seed", mom.seed, "Seed");
    mom_cmd->add_option("--format", mom.format)->check(CLI::IsMember({"json", "csv"}));
    mom_cmd->add_option("--out", mom.out_path, "Output path (default stdout)");
    mom_cmd->callback([&] { runner = [&] { return run_check_moments(mom); }; });

    CLI::App* selftest_cmd =
        app.add_subcommand("selftest", "Exact hand-checkable estimator examples");
    selftest_cmd->fallthrough();
    selftest_cmd->callback([&] { runner = run_selftest; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

#ifdef _OPENMP
    if (threads > 0) {
        omp_set_num_threads(threads);
    }
#endif

    try {
        return runner ? runner() : kExitOk;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}
