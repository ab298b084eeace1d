#include "fixedk/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#include "fixedk/errors.hpp"
#include "fixedk/rng.hpp"
#include "fixedk/sample_set.hpp"
#include "fixedk/stats.hpp"

namespace fixedk {

LineFit fit_loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) {
        throw cardinality_error("fit_loglog_slope: xs and ys must have equal length");
    }
    if (xs.size() < 2) {
        throw cardinality_error("fit_loglog_slope: need at least two points");
    }
    const std::size_t n = xs.size();
    std::vector<double> lx(n);
    std::vector<double> ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) {
            throw std::domain_error("fit_loglog_slope: coordinates must be strictly positive");
        }
        lx[i] = std::log(xs[i]);
        ly[i] = std::log(ys[i]);
    }
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_x += lx[i];
        mean_y += ly[i];
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = lx[i] - mean_x;
        sxx += dx * dx;
        sxy += dx * (ly[i] - mean_y);
    }
    if (!(sxx > 0.0)) {
        throw std::domain_error("fit_loglog_slope: x values must not all coincide");
    }
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = mean_y - fit.slope * mean_x;
    return fit;
}

void SweepConfig::validate() const {
    dist_p.validate();
    metric.validate();
    if (static_cast<int>(dist_p.dimension()) != metric.dimension) {
        throw dimension_error("sweep: distribution dimension does not match metric dimension");
    }
    functional.validate();
    if (functional.is_divergence()) {
        if (!dist_q) {
            throw parameter_error("sweep: divergence functionals require a second distribution");
        }
        dist_q->validate();
        if (dist_q->dimension() != dist_p.dimension()) {
            throw dimension_error("sweep: P and Q distributions must share a dimension");
        }
    } else if (dist_q) {
        throw parameter_error("sweep: second distribution given for a single-sample functional");
    }
    if (ks.empty()) {
        throw parameter_error("sweep: at least one neighbor order k is required");
    }
    for (int k : ks) {
        if (k < 1) {
            throw parameter_error("sweep: neighbor order k must be >= 1");
        }
        functional.validate_with_k(k);
    }
    if (n_grid.size() < 1) {
        throw parameter_error("sweep: sample-size grid must be nonempty");
    }
    for (std::size_t i = 0; i + 1 < n_grid.size(); ++i) {
        if (n_grid[i] >= n_grid[i + 1]) {
            throw parameter_error("sweep: sample-size grid must be strictly increasing");
        }
    }
    const int max_k = *std::max_element(ks.begin(), ks.end());
    for (std::size_t n : n_grid) {
        if (n <= static_cast<std::size_t>(max_k)) {
            throw parameter_error("sweep: every grid size must exceed every neighbor order");
        }
    }
    if (trials < 2) {
        throw parameter_error("sweep: at least two trials per grid point are required");
    }
    if (expected_beta) {
        const double b = *expected_beta;
        if (!(b > 0.0) || !(b <= 2.0)) {
            throw parameter_error("sweep: expected smoothness exponent must lie in (0, 2]");
        }
    }
}

SweepCell summarize_trials(std::size_t n, int k, double truth,
                           const std::vector<double>& estimates,
                           const std::vector<char>& aborted) {
    if (estimates.size() != aborted.size()) {
        throw cardinality_error("summarize_trials: estimates and abort flags must align");
    }
    SweepCell cell;
    cell.n = n;
    cell.k = k;
    std::vector<double> kept;
    kept.reserve(estimates.size());
    for (std::size_t t = 0; t < estimates.size(); ++t) {
        if (aborted[t]) {
            ++cell.trials_aborted;
        } else {
            kept.push_back(estimates[t]);
        }
    }
    cell.trials_used = static_cast<int>(kept.size());
    if (cell.trials_used < 2) {
        throw insufficient_data_error(
            "summarize_trials: fewer than two usable trials at n=" + std::to_string(n));
    }
    const MeanVariance mv = mean_and_variance(kept);
    cell.mean_estimate = mv.mean;
    cell.bias = mv.mean - truth;
    cell.variance = mv.variance;
    cell.mse = cell.bias * cell.bias + cell.variance;
    return cell;
}

namespace {

// Evaluates the configured functional on freshly drawn samples for one trial.
double evaluate_trial(const SweepConfig& config, int k, const SampleSet& samples_p,
                      const SampleSet* samples_q) {
    switch (config.functional.kind) {
        case FunctionalKind::shannon_entropy:
            return shannon_entropy(samples_p, k).value;
        case FunctionalKind::renyi_functional:
            return renyi_functional(samples_p, k, *config.functional.alpha).value;
        case FunctionalKind::kl_divergence:
            return kl_divergence(samples_p, *samples_q, k).value;
        case FunctionalKind::alpha_divergence_functional:
            return alpha_divergence_functional(samples_p, *samples_q, k,
                                               *config.functional.alpha)
                .value;
        case FunctionalKind::plug_in:
            return plug_in(samples_p, k, config.functional).value;
    }
    throw parameter_error("sweep: unknown functional kind");
}

}  // namespace

SweepResult run_sweep(const SweepConfig& config) {
    config.validate();

    SweepResult result;
    result.config = config;
    result.ground_truth = true_functional(config.dist_p, config.dist_q, config.functional);

    const std::size_t num_k = config.ks.size();
    const int trials = config.trials;

    for (std::size_t n_index = 0; n_index < config.n_grid.size(); ++n_index) {
        const std::size_t n = config.n_grid[n_index];
        // estimates[k_index][trial]
        std::vector<std::vector<double>> estimates(num_k,
                                                   std::vector<double>(trials, 0.0));
        std::vector<std::vector<char>> aborted(num_k, std::vector<char>(trials, 0));

#pragma omp parallel for schedule(dynamic)
        for (int t = 0; t < trials; ++t) {
            const std::uint64_t trial_seed = derive_seed(
                config.master_seed, static_cast<std::uint64_t>(n_index),
                static_cast<std::uint64_t>(t));
            try {
                const SampleSet samples_p =
                    sample(config.dist_p, n, derive_seed(trial_seed, 0), config.metric);
                std::optional<SampleSet> samples_q;
                if (config.dist_q) {
                    samples_q =
                        sample(*config.dist_q, n, derive_seed(trial_seed, 1), config.metric);
                }
                for (std::size_t ki = 0; ki < num_k; ++ki) {
                    try {
                        estimates[ki][static_cast<std::size_t>(t)] = evaluate_trial(
                            config, config.ks[ki], samples_p,
                            samples_q ? &*samples_q : nullptr);
                    } catch (const std::exception&) {
                        aborted[ki][static_cast<std::size_t>(t)] = 1;
                    }
                }
            } catch (const std::exception&) {
                for (std::size_t ki = 0; ki < num_k; ++ki) {
                    aborted[ki][static_cast<std::size_t>(t)] = 1;
                }
            }
        }

        for (std::size_t ki = 0; ki < num_k; ++ki) {
            const SweepCell cell = summarize_trials(n, config.ks[ki], result.ground_truth.value,
                                                    estimates[ki], aborted[ki]);
            if (cell.trials_aborted * 10 > trials) {
                throw sweep_error("sweep: more than 10% of trials aborted at n=" +
                                  std::to_string(n) + ", k=" + std::to_string(cell.k));
            }
            result.cells.push_back(cell);
        }
    }

    // Convergence fits per k across the n grid.
    for (std::size_t ki = 0; ki < num_k; ++ki) {
        ConvergenceFits fits;
        fits.k = config.ks[ki];
        std::vector<double> ns;
        std::vector<double> abs_bias;
        std::vector<double> variances;
        std::vector<double> mses;
        for (const SweepCell& cell : result.cells) {
            if (cell.k != fits.k) {
                continue;
            }
            ns.push_back(static_cast<double>(cell.n));
            abs_bias.push_back(std::abs(cell.bias));
            variances.push_back(cell.variance);
            mses.push_back(cell.mse);
        }
        auto try_fit = [&](const std::vector<double>& ys) -> std::optional<LineFit> {
            try {
                return fit_loglog_slope(ns, ys);
            } catch (const std::exception&) {
                return std::nullopt;  // degenerate data (zero bias, single grid point, ...)
            }
        };
        fits.bias_fit = try_fit(abs_bias);
        fits.variance_fit = try_fit(variances);
        fits.mse_fit = try_fit(mses);
        result.fits.push_back(fits);
    }

    return result;
}

}  // namespace fixedk
