#pragma once

#include <optional>
#include <span>
#include <string>

#include "fixedk/metric.hpp"
#include "fixedk/neighbors.hpp"
#include "fixedk/sample_set.hpp"

namespace fixedk {

enum class FunctionalKind {
    shannon_entropy,
    renyi_functional,
    kl_divergence,
    alpha_divergence_functional,
    plug_in,
};

enum class PlugInMap { log_map, power_map };

// Which density functional to estimate. `alpha` is required for the Renyi and
// alpha-divergence functionals (real, != 1) and absent otherwise; the plug-in
// estimator instead names a scalar map f applied to the density estimate:
// log, or power with a fixed exponent (e.g. alpha - 1).
struct FunctionalSpec {
    FunctionalKind kind = FunctionalKind::shannon_entropy;
    std::optional<double> alpha;
    std::optional<PlugInMap> plug_in_f;
    std::optional<double> power_exponent;

    static FunctionalSpec shannon();
    static FunctionalSpec renyi(double alpha);
    static FunctionalSpec kl();
    static FunctionalSpec alpha_divergence(double alpha);
    static FunctionalSpec plug_in_log();
    static FunctionalSpec plug_in_power(double exponent);

    // Shape check: alpha present exactly when required and != 1, plug-in map
    // present exactly for plug_in. Throws parameter_error.
    void validate() const;

    // Gamma-argument positivity for the bias corrections at a given k:
    // renyi needs k + 1 - alpha > 0; alpha-divergence needs k - alpha + 1 > 0
    // and k + alpha - 1 > 0. Throws parameter_error.
    void validate_with_k(int k) const;

    bool is_divergence() const {
        return kind == FunctionalKind::kl_divergence ||
               kind == FunctionalKind::alpha_divergence_functional;
    }
};

std::string to_string(FunctionalKind kind);

// One estimate plus the context needed to interpret it.
struct Estimate {
    double value = 0.0;
    FunctionalSpec functional;
    int k = 0;
    std::size_t n = 0;
    std::optional<std::size_t> m;  // reference sample size, divergences only
    MetricConfig metric;
    std::string correction_description;
    std::optional<double> renyi_entropy;  // log(value) / (1 - alpha), Renyi only
};

// k-NN density estimate at `query`: (k/n) / (c_{D,r} * eps_k^D), where n is the
// total sample count (an excluded self still counts toward n) and eps_k is the
// k-th neighbor distance. Throws degenerate_sample_error when eps_k = 0.
double knn_density(const SampleSet& data, std::span<const double> query, int k,
                   std::optional<std::size_t> exclude_index = std::nullopt);

// Bias-corrected Shannon entropy (nats):
//   H = psi(n) - psi(k) + log c_{D,r} + (D/n) * sum_i log eps_k(X_i).
Estimate shannon_entropy(const SampleSet& data, int k);

// Bias-corrected Renyi functional E[p^(alpha-1)]:
//   F = Gamma(k) / Gamma(k+1-alpha) * (1/n) * sum_i phat_k(X_i)^(alpha-1),
// with the derived Renyi entropy log(F)/(1-alpha) attached.
Estimate renyi_functional(const SampleSet& data, int k, double alpha);

// KL divergence estimate (nats); the p- and q-side corrections cancel exactly:
//   KL = (D/n) * sum_i log(delta_k(X_i) / eps_k(X_i)) + log(m / (n-1)).
Estimate kl_divergence(const SampleSet& data_p, const SampleSet& data_q, int k);

// Bias-corrected alpha-divergence functional E_P[(p/q)^(alpha-1)]:
//   F = Gamma(k)^2 / (Gamma(k-alpha+1) Gamma(k+alpha-1))
//       * (1/n) * sum_i (phat_k(X_i) / qhat_k(X_i))^(alpha-1).
Estimate alpha_divergence_functional(const SampleSet& data_p, const SampleSet& data_q, int k,
                                     double alpha);

// Uncorrected plug-in baseline (1/n) * sum_i f(phat_k(X_i)) for f = log or
// f = power(exponent). `spec.kind` must be plug_in.
Estimate plug_in(const SampleSet& data, int k, const FunctionalSpec& spec);

}  // namespace fixedk
