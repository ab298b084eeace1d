#include "fixedk/theory_checks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fixedk/errors.hpp"
#include "fixedk/rng.hpp"
#include "fixedk/special_functions.hpp"
#include "fixedk/stats.hpp"

namespace fixedk {

namespace {

void check_grid_arguments(int n, int k, int dim, int trials, int min_trials, const char* op) {
    if (dim < 1) {
        throw parameter_error(std::string(op) + ": dimension must be >= 1");
    }
    if (n < 1 || k < 1 || k > n) {
        throw cardinality_error(std::string(op) + ": need 1 <= k <= n, got k = " +
                                std::to_string(k) + ", n = " + std::to_string(n));
    }
    if (trials < min_trials) {
        throw parameter_error(std::string(op) + ": needs at least " + std::to_string(min_trials) +
                              " trials, got " + std::to_string(trials));
    }
}

// k-th smallest sup-norm distance from `query` among n uniform draws.
double kth_uniform_distance(int n, int k, int dim, std::span<const double> query,
                            std::uint64_t seed, std::vector<double>& scratch) {
    CounterRng rng(seed);
    scratch.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double dist = 0.0;
        for (int j = 0; j < dim; ++j) {
            dist = std::max(dist, std::fabs(rng.next_unit() - query[j]));
        }
        scratch[static_cast<std::size_t>(i)] = dist;
    }
    std::nth_element(scratch.begin(), scratch.begin() + (k - 1), scratch.end());
    return scratch[static_cast<std::size_t>(k - 1)];
}

Point center_point(int dim) {
    return Point(static_cast<std::size_t>(dim), 0.5);
}

}  // namespace

TailEnvelope uniform_sup_norm_envelope(int dim) {
    return {std::ldexp(1.0, -dim), 1.0};
}

bool ConcentrationReport::all_pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const ConcentrationRow& r) { return r.pass; });
}

std::vector<double> default_concentration_radii(int n, int k, int dim) {
    const TailEnvelope env = uniform_sup_norm_envelope(dim);
    const double d = static_cast<double>(dim);
    const double upper_min = std::pow(k / (env.p_lower * n), 1.0 / d);
    const double lower_max = std::pow(k / (env.p_upper * n), 1.0 / d);
    std::vector<double> radii;
    for (double m : {0.15, 0.225, 0.3, 0.375, 0.45}) {
        radii.push_back(m * lower_max);
    }
    for (double m : {1.2, 1.5, 2.0, 2.5, 3.0}) {
        radii.push_back(m * upper_min);
    }
    return radii;
}

ConcentrationReport concentration_check(int n, int k, int dim, std::span<const double> radii,
                                        int trials, std::uint64_t seed) {
    check_grid_arguments(n, k, dim, trials, 1000, "concentration_check");
    if (radii.empty()) {
        throw parameter_error("concentration_check: needs at least one radius");
    }
    for (double r : radii) {
        if (!(r > 0.0)) {
            throw parameter_error("concentration_check: radii must be positive");
        }
    }

    const TailEnvelope env = uniform_sup_norm_envelope(dim);
    const double d = static_cast<double>(dim);
    const double upper_min = std::pow(k / (env.p_lower * n), 1.0 / d);
    const double lower_max = std::pow(k / (env.p_upper * n), 1.0 / d);

    ConcentrationReport report;
    report.n = n;
    report.k = k;
    report.dim = dim;
    report.trials = trials;
    report.seed = seed;

    const Point query = center_point(dim);
    for (double r : radii) {
        for (TailSide side : {TailSide::upper, TailSide::lower}) {
            ConcentrationRow row;
            row.radius = r;
            row.side = side;
            const bool valid = side == TailSide::upper ? r > upper_min : r < lower_max;
            const std::size_t row_index = report.rows.size();
            if (!valid) {
                row.skipped = true;
                report.rows.push_back(row);
                continue;
            }
            const double rdn = std::pow(r, d) * static_cast<double>(n);
            constexpr double e = std::numbers::e;
            if (side == TailSide::upper) {
                row.analytic_bound = std::exp(-env.p_lower * rdn) *
                                     std::pow(e * env.p_lower * rdn / k, static_cast<double>(k));
            } else {
                const double exponent = k * env.p_lower / env.p_upper;
                row.analytic_bound = std::exp(-env.p_lower * rdn) *
                                     std::pow(e * env.p_upper * rdn / k, exponent);
            }

            long hits = 0;
#pragma omp parallel
            {
                std::vector<double> scratch;
#pragma omp for schedule(static) reduction(+ : hits)
                for (int t = 0; t < trials; ++t) {
                    const double eps = kth_uniform_distance(
                        n, k, dim, query,
                        derive_seed(seed, row_index, static_cast<std::uint64_t>(t)), scratch);
                    const bool hit = side == TailSide::upper ? eps > r : eps < r;
                    hits += hit ? 1 : 0;
                }
            }
            row.empirical_tail = static_cast<double>(hits) / static_cast<double>(trials);
            row.standard_error = std::sqrt(row.empirical_tail * (1.0 - row.empirical_tail) /
                                           static_cast<double>(trials));
            row.pass = row.empirical_tail <= row.analytic_bound + 3.0 * row.standard_error;
            report.rows.push_back(row);
        }
    }
    return report;
}

ErlangReport erlang_check(int n, int k, int dim, int trials, std::uint64_t seed,
                          std::span<const double> query) {
    if (trials < 1) {
        throw insufficient_data_error("erlang_check: needs at least one trial");
    }
    check_grid_arguments(n, k, dim, trials, 1, "erlang_check");

    ErlangReport report;
    report.n = n;
    report.k = k;
    report.dim = dim;
    report.trials = trials;
    report.seed = seed;
    report.query = query.empty() ? center_point(dim) : Point(query.begin(), query.end());

    const MetricConfig metric{dim, kSupNorm};
    const double guard = distance_to_boundary(report.query, metric);
    const double d = static_cast<double>(dim);

    // One slot per trial keeps the kept-trial order deterministic.
    std::vector<double> normalized(static_cast<std::size_t>(trials));
    constexpr double kDiscarded = -1.0;
#pragma omp parallel
    {
        std::vector<double> scratch;
#pragma omp for schedule(static)
        for (int t = 0; t < trials; ++t) {
            const double eps = kth_uniform_distance(
                n, k, dim, report.query, derive_seed(seed, static_cast<std::uint64_t>(t)),
                scratch);
            // Keep only trials whose ball stays inside the cube; there the
            // uniform ball probability is exactly (2 eps)^D.
            normalized[static_cast<std::size_t>(t)] =
                eps > guard ? kDiscarded : static_cast<double>(n) * std::pow(2.0 * eps, d);
        }
    }

    std::vector<double> kept;
    kept.reserve(normalized.size());
    for (double value : normalized) {
        if (value == kDiscarded) {
            ++report.trials_discarded;
        } else {
            kept.push_back(value);
        }
    }
    report.trials_used = static_cast<int>(kept.size());
    if (kept.empty()) {
        throw insufficient_data_error("erlang_check: every trial hit the boundary guard");
    }
    const double s = static_cast<double>(k);
    report.ks_statistic =
        ks_distance(std::move(kept), [s](double t) { return regularized_lower_gamma(s, t); });
    return report;
}

MomentBoundReport moment_bound_check(int n, int k, int dim, double alpha, int trials,
                                     std::uint64_t seed) {
    check_grid_arguments(n, k, dim, trials, 2, "moment_bound_check");
    const TailEnvelope env = uniform_sup_norm_envelope(dim);
    const double d = static_cast<double>(dim);
    const double kappa = k * env.p_lower / env.p_upper;
    if (alpha == 0.0 || !(alpha == alpha)) {
        throw parameter_error("moment_bound_check: alpha must be nonzero");
    }
    if (alpha < 0.0 && !(d * kappa + alpha > 0.0)) {
        throw parameter_error("moment_bound_check: negative alpha must satisfy alpha > -D kappa "
                              "= " + std::to_string(-d * kappa));
    }

    MomentBoundReport report;
    report.n = n;
    report.k = k;
    report.dim = dim;
    report.trials = trials;
    report.seed = seed;
    report.alpha = alpha;

    if (alpha > 0.0) {
        const double volume = unit_ball_volume(MetricConfig{dim, kSupNorm});
        report.analytic_bound = (1.0 + alpha / d) *
                                std::pow(k / (volume * n * env.p_lower), alpha / d);
    } else {
        report.analytic_bound = (1.0 - alpha / (d * kappa + alpha)) *
                                std::pow(k / (env.p_upper * n), alpha / d);
    }

    const Point query = center_point(dim);
    std::vector<double> moments(static_cast<std::size_t>(trials));
#pragma omp parallel
    {
        std::vector<double> scratch;
#pragma omp for schedule(static)
        for (int t = 0; t < trials; ++t) {
            const double eps = kth_uniform_distance(
                n, k, dim, query, derive_seed(seed, static_cast<std::uint64_t>(t)), scratch);
            moments[static_cast<std::size_t>(t)] = std::pow(eps, alpha);
        }
    }
    const MeanVariance mv = mean_and_variance(moments);
    report.empirical_moment = mv.mean;
    report.standard_error = std::sqrt(mv.variance / static_cast<double>(trials));
    report.pass = report.empirical_moment <= report.analytic_bound + 3.0 * report.standard_error;
    return report;
}

}  // namespace fixedk
