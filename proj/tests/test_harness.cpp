#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <json.hpp>

#include "fixedk/errors.hpp"
#include "fixedk/io.hpp"
#include "fixedk/sweep.hpp"

using namespace fixedk;

namespace {

bool close_abs(double x, double y, double tol) {
    return std::fabs(x - y) <= tol;
}

bool close_rel(double x, double y, double tol) {
    return std::fabs(x - y) <= tol * std::max(std::fabs(x), std::fabs(y));
}

// Writes `text` to a fresh temp file and returns its path.
class TempFile {
  public:
    explicit TempFile(const std::string& text) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("fixedk_io_test_" + std::to_string(++counter) + ".csv");
        std::ofstream out(path_);
        out << text;
    }
    ~TempFile() {
        std::error_code ec;
        std::filesystem::remove(path_, ec);
    }
    std::string path() const { return path_.string(); }

  private:
    std::filesystem::path path_;
};

SweepConfig small_sweep_config() {
    SweepConfig cfg;
    cfg.dist_p = parse_distribution_spec("uniform");
    cfg.functional = FunctionalSpec::shannon();
    cfg.ks = {1};
    cfg.metric = {1, 2.0};
    cfg.n_grid = {32, 64};
    cfg.trials = 8;
    cfg.master_seed = 42;
    return cfg;
}

template <typename T>
std::string emitted(const T& value, Format format) {
    std::ostringstream out;
    emit(out, value, format);
    return out.str();
}

}  // namespace

TEST_CASE("log-log line fits on exact power laws") {
    const LineFit down = fit_loglog_slope({10.0, 100.0}, {0.1, 0.01});
    CHECK(close_abs(down.slope, -1.0, 1e-12));
    CHECK(close_abs(down.intercept, 0.0, 1e-12));

    const LineFit flat = fit_loglog_slope({1.0, 100.0}, {2.0, 2.0});
    CHECK(close_abs(flat.slope, 0.0, 1e-12));
    CHECK(close_abs(flat.intercept, std::log(2.0), 1e-12));

    const double e1 = std::exp(1.0), e2 = std::exp(2.0), e4 = std::exp(4.0);
    const LineFit steep = fit_loglog_slope({e1, e2}, {e2, e4});
    CHECK(close_abs(steep.slope, 2.0, 1e-12));

    const LineFit three = fit_loglog_slope({1.0, 10.0, 100.0}, {1.0, 0.1, 0.01});
    CHECK(close_abs(three.slope, -1.0, 1e-12));
    CHECK(close_abs(three.intercept, 0.0, 1e-12));
}

TEST_CASE("log-log fit input validation") {
    CHECK_THROWS_AS(fit_loglog_slope({1.0}, {1.0}), cardinality_error);
    CHECK_THROWS_AS(fit_loglog_slope({1.0, 2.0}, {1.0}), cardinality_error);
    CHECK_THROWS_AS(fit_loglog_slope({0.0, 2.0}, {1.0, 1.0}), std::domain_error);
    CHECK_THROWS_AS(fit_loglog_slope({1.0, 2.0}, {1.0, -1.0}), std::domain_error);
    CHECK_THROWS_AS(fit_loglog_slope({2.0, 2.0}, {1.0, 3.0}), std::domain_error);
}

TEST_CASE("summarize_trials folds estimates into bias, variance, and MSE") {
    const SweepCell cell = summarize_trials(32, 1, 2.0, {1.0, 2.0, 3.0, 4.0}, {0, 0, 0, 0});
    CHECK(cell.n == 32);
    CHECK(cell.k == 1);
    CHECK(close_abs(cell.mean_estimate, 2.5, 1e-15));
    CHECK(close_abs(cell.bias, 0.5, 1e-15));
    CHECK(close_abs(cell.variance, 5.0 / 3.0, 1e-14));
    CHECK(cell.mse == cell.bias * cell.bias + cell.variance);
    CHECK(cell.trials_used == 4);
    CHECK(cell.trials_aborted == 0);
}

TEST_CASE("summarize_trials skips aborted slots") {
    const SweepCell cell = summarize_trials(16, 2, 2.0, {1.0, 999.0, 3.0}, {0, 1, 0});
    CHECK(close_abs(cell.mean_estimate, 2.0, 1e-15));
    CHECK(close_abs(cell.bias, 0.0, 1e-15));
    CHECK(close_abs(cell.variance, 2.0, 1e-14));
    CHECK(cell.trials_used == 2);
    CHECK(cell.trials_aborted == 1);

    CHECK_THROWS_AS(summarize_trials(16, 1, 0.0, {1.0, 2.0}, {0, 1}), insufficient_data_error);
    CHECK_THROWS_AS(summarize_trials(16, 1, 0.0, {1.0, 2.0}, {0}), cardinality_error);
}

TEST_CASE("sweep configuration validation") {
    SweepConfig cfg = small_sweep_config();
    CHECK_NOTHROW(cfg.validate());

    SweepConfig bad = cfg;
    bad.metric.dimension = 2;
    CHECK_THROWS_AS(bad.validate(), dimension_error);

    bad = cfg;
    bad.functional = FunctionalSpec::kl();
    CHECK_THROWS_AS(bad.validate(), parameter_error);  // divergence without q

    bad = cfg;
    bad.dist_q = parse_distribution_spec("uniform");
    CHECK_THROWS_AS(bad.validate(), parameter_error);  // q for a single-sample functional

    bad = cfg;
    bad.functional = FunctionalSpec::kl();
    bad.dist_q = parse_distribution_spec("uniform^2");
    CHECK_THROWS_AS(bad.validate(), dimension_error);

    bad = cfg;
    bad.ks = {};
    CHECK_THROWS_AS(bad.validate(), parameter_error);
    bad.ks = {0};
    CHECK_THROWS_AS(bad.validate(), parameter_error);

    bad = cfg;
    bad.n_grid = {};
    CHECK_THROWS_AS(bad.validate(), parameter_error);
    bad.n_grid = {64, 64};
    CHECK_THROWS_AS(bad.validate(), parameter_error);
    bad.n_grid = {64, 32};
    CHECK_THROWS_AS(bad.validate(), parameter_error);

    bad = cfg;
    bad.ks = {3};
    bad.n_grid = {3, 64};
    CHECK_THROWS_AS(bad.validate(), parameter_error);

    bad = cfg;
    bad.trials = 1;
    CHECK_THROWS_AS(bad.validate(), parameter_error);

    bad = cfg;
    bad.expected_beta = 0.0;
    CHECK_THROWS_AS(bad.validate(), parameter_error);
    bad.expected_beta = 2.5;
    CHECK_THROWS_AS(bad.validate(), parameter_error);
    bad.expected_beta = 2.0;
    CHECK_NOTHROW(bad.validate());

    bad = cfg;
    bad.functional = FunctionalSpec::renyi(1.0);
    CHECK_THROWS_AS(bad.validate(), parameter_error);
}

TEST_CASE("a small sweep is deterministic and internally consistent") {
    const SweepConfig cfg = small_sweep_config();
    const SweepResult r1 = run_sweep(cfg);
    const SweepResult r2 = run_sweep(cfg);

    CHECK(close_abs(r1.ground_truth.value, 0.0, 1e-13));
    CHECK(r1.ground_truth.method == TruthMethod::closed_form);

    REQUIRE(r1.cells.size() == 2);
    REQUIRE(r2.cells.size() == 2);
    for (std::size_t i = 0; i < r1.cells.size(); ++i) {
        CHECK(r1.cells[i].mean_estimate == r2.cells[i].mean_estimate);
        CHECK(r1.cells[i].variance == r2.cells[i].variance);
        CHECK(r1.cells[i].mse == r1.cells[i].bias * r1.cells[i].bias + r1.cells[i].variance);
        CHECK(r1.cells[i].trials_used == 8);
        CHECK(r1.cells[i].trials_aborted == 0);
    }
    CHECK(r1.cells[0].n == 32);
    CHECK(r1.cells[1].n == 64);

    REQUIRE(r1.fits.size() == 1);
    CHECK(r1.fits[0].k == 1);
    CHECK(r1.fits[0].variance_fit.has_value());
    CHECK(r1.fits[0].mse_fit.has_value());
}

#ifdef _OPENMP
TEST_CASE("sweep results do not depend on the thread count") {
    const SweepConfig cfg = small_sweep_config();
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const SweepResult serial = run_sweep(cfg);
    omp_set_num_threads(4);
    const SweepResult parallel = run_sweep(cfg);
    omp_set_num_threads(saved);

    REQUIRE(serial.cells.size() == parallel.cells.size());
    for (std::size_t i = 0; i < serial.cells.size(); ++i) {
        CHECK(serial.cells[i].mean_estimate == parallel.cells[i].mean_estimate);
        CHECK(serial.cells[i].variance == parallel.cells[i].variance);
    }
}
#endif

TEST_CASE("a divergence sweep runs with a second distribution") {
    SweepConfig cfg = small_sweep_config();
    cfg.dist_p = parse_distribution_spec("beta:2,2");
    cfg.dist_q = parse_distribution_spec("uniform");
    cfg.functional = FunctionalSpec::kl();
    cfg.ks = {1, 3};
    const SweepResult r = run_sweep(cfg);

    CHECK(close_rel(r.ground_truth.value, 0.12509280256138833, 1e-12));
    REQUIRE(r.cells.size() == 4);  // n-major, k-minor
    CHECK(r.cells[0].n == 32);
    CHECK(r.cells[0].k == 1);
    CHECK(r.cells[1].n == 32);
    CHECK(r.cells[1].k == 3);
    CHECK(r.cells[2].n == 64);
    CHECK(r.cells[3].n == 64);
    REQUIRE(r.fits.size() == 2);
    for (const SweepCell& cell : r.cells) {
        CHECK(std::isfinite(cell.mean_estimate));
        CHECK(cell.trials_used == 8);
    }
}

TEST_CASE("load_samples reads plain and headered CSV") {
    const TempFile basic("0.25\n0.75\n");
    const SampleSet s = load_samples(basic.path(), 1, {1, 2.0});
    REQUIRE(s.size() == 2);
    CHECK(s.point(0)[0] == 0.25);
    CHECK(s.point(1)[0] == 0.75);

    const TempFile headered("x,y\n0.25,0.5\n");
    const SampleSet h = load_samples(headered.path(), 2, {2, 2.0});
    REQUIRE(h.size() == 1);
    CHECK(h.point(0)[1] == 0.5);

    const TempFile blanks("0.25\n\n   \n0.75\n");
    CHECK(load_samples(blanks.path(), 1, {1, 2.0}).size() == 2);

    const TempFile scientific("2.5e-1\n");
    CHECK(load_samples(scientific.path(), 1, {1, 2.0}).point(0)[0] == 0.25);
}

TEST_CASE("load_samples reports 1-based line numbers on malformed rows") {
    const TempFile wide("0.1,0.2,0.3\n");
    try {
        load_samples(wide.path(), 2, {2, 2.0});
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        CHECK(e.line == 1);
    }

    const TempFile bad_cell("x\n0.25\nabc\n");
    try {
        load_samples(bad_cell.path(), 1, {1, 2.0});
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        CHECK(e.line == 3);
    }

    const TempFile ragged("0.1,0.2\n0.3\n");
    try {
        load_samples(ragged.path(), 2, {2, 2.0});
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        CHECK(e.line == 2);
    }
}

TEST_CASE("load_samples support and shape validation") {
    const TempFile outside("1.5\n");
    CHECK_THROWS_AS(load_samples(outside.path(), 1, MetricConfig{1, 2.0}), support_error);
    const SampleSet loose = load_samples(outside.path(), 1, {1, 2.0}, true);
    CHECK_FALSE(loose.in_unit_cube());

    const TempFile empty("");
    CHECK_THROWS_AS(load_samples(empty.path(), 1, MetricConfig{1, 2.0}), parse_error);
    const TempFile only_header("x\n");
    CHECK_THROWS_AS(load_samples(only_header.path(), 1, MetricConfig{1, 2.0}), parse_error);

    const TempFile fine("0.5\n");
    CHECK_THROWS_AS(load_samples(fine.path(), 2, MetricConfig{1, 2.0}), dimension_error);
    CHECK_THROWS_AS(load_samples("/nonexistent/fixedk.csv", 1, MetricConfig{1, 2.0}),
                    parse_error);
}

TEST_CASE("emitters are deterministic and produce well-formed JSON") {
    const SampleSet data = sample(parse_distribution_spec("beta:2,2"), 64, 3,
                                  MetricConfig{1, kSupNorm});
    const Estimate est = shannon_entropy(data, 2);

    const std::string once = emitted(est, Format::json);
    CHECK(once == emitted(est, Format::json));
    CHECK(once.back() == '\n');

    const nlohmann::json j = nlohmann::json::parse(once);
    CHECK(j.contains("functional"));
    CHECK(j["functional"]["kind"] == "shannon");
    CHECK(j["k"] == 2);
    CHECK(j["n"] == 64);
    CHECK(j["value"].is_number());
    CHECK(j.contains("correction_description"));
    CHECK(j["metric"]["dimension"] == 1);
    CHECK(j["metric"]["order"] == "inf");  // IEEE infinity serialized as a string

    const std::string csv = emitted(est, Format::csv);
    CHECK(csv.rfind("functional,alpha,k,n,m,dimension,order,value,renyi_entropy\n", 0) == 0);

    const SampleSet euclid = sample(parse_distribution_spec("beta:2,2"), 32, 4);
    const Estimate renyi = renyi_functional(euclid, 2, 0.5);
    const nlohmann::json jr = nlohmann::json::parse(emitted(renyi, Format::json));
    CHECK(jr["functional"]["alpha"] == 0.5);
    CHECK(jr.contains("renyi_entropy"));
    CHECK(jr["metric"]["order"] == 2.0);
}

TEST_CASE("ground truth and sweep emitters expose the documented keys") {
    const GroundTruthValue truth = true_functional(parse_distribution_spec("beta:2,2"),
                                                   std::nullopt, FunctionalSpec::shannon());
    const nlohmann::json jt = nlohmann::json::parse(emitted(truth, Format::json));
    CHECK(jt["method"] == "closed_form");
    CHECK(jt["error_bound"] == 0.0);
    CHECK(jt["value"].is_number());

    const SweepResult sweep = run_sweep(small_sweep_config());
    const std::string json_text = emitted(sweep, Format::json);
    CHECK(json_text == emitted(sweep, Format::json));
    const nlohmann::json js = nlohmann::json::parse(json_text);
    for (const char* key :
         {"functional", "dist_p", "metric", "ks", "n_grid", "trials", "seed", "ground_truth",
          "cells", "fits"}) {
        CHECK(js.contains(key));
    }
    CHECK(js["ground_truth"].contains("error_bound"));
    REQUIRE(js["cells"].is_array());
    CHECK(js["cells"].size() == 2);
    const nlohmann::json& cell = js["cells"][0];
    for (const char* key :
         {"n", "k", "mean_estimate", "bias", "variance", "mse", "trials_used",
          "trials_aborted"}) {
        CHECK(cell.contains(key));
    }

    const std::string csv = emitted(sweep, Format::csv);
    CHECK(csv.rfind("n,k,mean_estimate,bias,variance,mse,trials_used,trials_aborted\n", 0) == 0);
}

TEST_CASE("check-report emitters round-trip through JSON") {
    const std::vector<double> radii{0.1};
    const ConcentrationReport conc = concentration_check(100, 1, 1, radii, 1000, 9);
    const nlohmann::json jc = nlohmann::json::parse(emitted(conc, Format::json));
    CHECK(jc["all_pass"].is_boolean());
    REQUIRE(jc["rows"].size() == 2);
    CHECK(jc["rows"][0].contains("empirical_tail"));
    CHECK(jc["rows"][1]["skipped"] == true);
    CHECK_FALSE(jc["rows"][1].contains("empirical_tail"));  // skipped rows omit empirics
    const std::string conc_csv = emitted(conc, Format::csv);
    CHECK(conc_csv.rfind("radius,side,skipped,", 0) == 0);

    const ErlangReport erl = erlang_check(64, 1, 1, 200, 2);
    const nlohmann::json je = nlohmann::json::parse(emitted(erl, Format::json));
    CHECK(je["ks_statistic"].is_number());
    CHECK(je["trials_used"].get<int>() + je["trials_discarded"].get<int>() == 200);

    const MomentBoundReport mom = moment_bound_check(100, 1, 1, 1.0, 2000, 3);
    const nlohmann::json jm = nlohmann::json::parse(emitted(mom, Format::json));
    CHECK(jm["analytic_bound"] == 0.02);
    CHECK(jm["pass"].is_boolean());
}
