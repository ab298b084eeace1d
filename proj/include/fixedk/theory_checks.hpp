#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fixedk/metric.hpp"

namespace fixedk {

// All checks below probe the k-th neighbor distance eps_k(x) of the query
// point x = cube center among n uniform draws on [0,1]^D under the sup norm.
// For that configuration the density-ratio envelope of any sup-norm ball
// around x is p_* = 2^-D (worst case: half of each coordinate slab clipped
// away) and p^* = 1 (uniform density).

struct TailEnvelope {
    double p_lower = 0.0;  // p_*
    double p_upper = 1.0;  // p^*
};

TailEnvelope uniform_sup_norm_envelope(int dim);

enum class TailSide { upper, lower };

struct ConcentrationRow {
    double radius = 0.0;
    TailSide side = TailSide::upper;
    bool skipped = false;  // radius outside the side's validity range
    double empirical_tail = 0.0;
    double analytic_bound = 0.0;
    double standard_error = 0.0;
    bool pass = true;
};

struct ConcentrationReport {
    int n = 0, k = 0, dim = 0, trials = 0;
    std::uint64_t seed = 0;
    std::vector<ConcentrationRow> rows;

    bool all_pass() const;
};

// Finite-sample tail bounds for eps_k(center):
//   upper side, valid for r > (k / (p_* n))^(1/D):
//     P[eps_k > r] <= exp(-p_* r^D n) (e p_* r^D n / k)^k
//   lower side, valid for r < (k / (p^* n))^(1/D):
//     P[eps_k < r] <= exp(-p_* r^D n) (e p^* r^D n / k)^(k p_*/p^*)
// Each radius is attempted on both sides; a side whose validity precondition
// fails becomes a SKIPPED row. Tested rows estimate the tail over `trials`
// fresh samples and pass iff empirical <= bound + 3 * binomial standard error.
ConcentrationReport concentration_check(int n, int k, int dim, std::span<const double> radii,
                                        int trials, std::uint64_t seed);

// Radii multipliers giving 5 valid radii per side: upper m * (k/(p_* n))^(1/D)
// with m in {1.2, 1.5, 2, 2.5, 3}; lower m * (k/(p^* n))^(1/D) with
// m in {0.15, 0.225, 0.3, 0.375, 0.45}. The lower multipliers stay small
// because the printed lower tail bound is only honest well inside its range.
std::vector<double> default_concentration_radii(int n, int k, int dim);

struct ErlangReport {
    int n = 0, k = 0, dim = 0, trials = 0;
    std::uint64_t seed = 0;
    Point query;  // defaults to the cube center
    double ks_statistic = 0.0;
    int trials_used = 0;
    int trials_discarded = 0;
};

// Distributional limit of the normalized statistic T = n c_{D,inf} eps_k^D
// = n (2 eps_k)^D, which for uniform data converges to Gamma(k, 1) (Erlang).
// Trials where the ball spills outside the cube (eps_k > distance to the
// boundary) are discarded; T is exact on the kept trials. Reports the
// Kolmogorov-Smirnov distance to the Gamma(k, 1) CDF P(k, .).
// Throws insufficient_data_error when no usable trials remain.
ErlangReport erlang_check(int n, int k, int dim, int trials, std::uint64_t seed,
                          std::span<const double> query = {});

struct MomentBoundReport {
    int n = 0, k = 0, dim = 0, trials = 0;
    std::uint64_t seed = 0;
    double alpha = 0.0;
    double empirical_moment = 0.0;
    double analytic_bound = 0.0;
    double standard_error = 0.0;
    bool pass = false;
};

// Finite-sample moment bound for E[eps_k^alpha] at the center query:
//   alpha > 0:            (1 + alpha/D) (k / (c_{D,r} n p_*))^(alpha/D)
//   alpha in (-D kappa,0): (1 - alpha/(D kappa + alpha)) (k / (p^* n))^(alpha/D),
// with kappa = k p_*/p^*. Passes iff the empirical moment is at most the bound
// plus 3 sample standard errors. alpha = 0 or alpha <= -D kappa is rejected.
MomentBoundReport moment_bound_check(int n, int k, int dim, double alpha, int trials,
                                     std::uint64_t seed);

}  // namespace fixedk
