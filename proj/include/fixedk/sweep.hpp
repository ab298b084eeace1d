#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "fixedk/distributions.hpp"
#include "fixedk/estimators.hpp"
#include "fixedk/metric.hpp"

namespace fixedk {

// Least-squares line fit in log-log coordinates: log y = slope * log x + intercept.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

// Fits a line to (log x, log y).  Requires at least two points, all strictly
// positive in both coordinates (throws cardinality_error / std::domain_error).
LineFit fit_loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys);

// Configuration for a Monte Carlo convergence sweep of one estimator over a
// grid of sample sizes.
struct SweepConfig {
    DistributionSpec dist_p;                 // sampling distribution for P
    std::optional<DistributionSpec> dist_q;  // second distribution for divergences
    FunctionalSpec functional;
    std::vector<int> ks;           // neighbor orders to sweep
    MetricConfig metric;           // dimension must match the distributions
    std::vector<std::size_t> n_grid;  // strictly increasing sample sizes
    int trials = 0;                // independent replicates per grid point (>= 2)
    std::uint64_t master_seed = 0;
    std::optional<double> expected_beta;  // smoothness exponent used in reports

    void validate() const;
};

// Monte Carlo summary for one (n, k) grid point.
struct SweepCell {
    std::size_t n = 0;
    int k = 0;
    double mean_estimate = 0.0;
    double bias = 0.0;      // mean_estimate - ground truth
    double variance = 0.0;  // unbiased sample variance across trials
    double mse = 0.0;       // bias^2 + variance
    int trials_used = 0;
    int trials_aborted = 0;
};

// Per-k log-log convergence fits over the n grid.
struct ConvergenceFits {
    int k = 0;
    std::optional<LineFit> bias_fit;      // |bias| vs n
    std::optional<LineFit> variance_fit;  // variance vs n
    std::optional<LineFit> mse_fit;       // mse vs n
};

struct SweepResult {
    SweepConfig config;
    GroundTruthValue ground_truth;
    std::vector<SweepCell> cells;  // outer order: n ascending, then k in config order
    std::vector<ConvergenceFits> fits;  // one entry per k, in config order
};

// Folds raw per-trial estimates (with abort flags) into a SweepCell.
// Exposed separately so the reduction logic is unit-testable without sampling.
SweepCell summarize_trials(std::size_t n, int k, double truth,
                           const std::vector<double>& estimates,
                           const std::vector<char>& aborted);

// Runs the full sweep: for every n in the grid, draws `trials` independent
// sample sets, evaluates the estimator for every k, and aggregates
// bias/variance/MSE against the closed-form (or quadrature) ground truth.
// Trials whose estimator throws are counted as aborted; a grid point with
// more than 10% aborted trials fails the sweep (sweep_error).
SweepResult run_sweep(const SweepConfig& config);

}  // namespace fixedk
