#include "fixedk/estimators.hpp"

#include <cmath>
#include <string>

#include "fixedk/errors.hpp"
#include "fixedk/special_functions.hpp"

namespace fixedk {

FunctionalSpec FunctionalSpec::shannon() {
    return {FunctionalKind::shannon_entropy, std::nullopt, std::nullopt, std::nullopt};
}
FunctionalSpec FunctionalSpec::renyi(double alpha) {
    return {FunctionalKind::renyi_functional, alpha, std::nullopt, std::nullopt};
}
FunctionalSpec FunctionalSpec::kl() {
    return {FunctionalKind::kl_divergence, std::nullopt, std::nullopt, std::nullopt};
}
FunctionalSpec FunctionalSpec::alpha_divergence(double alpha) {
    return {FunctionalKind::alpha_divergence_functional, alpha, std::nullopt, std::nullopt};
}
FunctionalSpec FunctionalSpec::plug_in_log() {
    return {FunctionalKind::plug_in, std::nullopt, PlugInMap::log_map, std::nullopt};
}
FunctionalSpec FunctionalSpec::plug_in_power(double exponent) {
    return {FunctionalKind::plug_in, std::nullopt, PlugInMap::power_map, exponent};
}

void FunctionalSpec::validate() const {
    const bool needs_alpha = kind == FunctionalKind::renyi_functional ||
                             kind == FunctionalKind::alpha_divergence_functional;
    if (needs_alpha) {
        if (!alpha) {
            throw parameter_error(to_string(kind) + " requires alpha");
        }
        if (!(*alpha == *alpha) || *alpha == 1.0) {
            throw parameter_error(to_string(kind) + " requires a real alpha != 1");
        }
    } else if (alpha) {
        throw parameter_error(to_string(kind) + " does not take alpha");
    }
    if (kind == FunctionalKind::plug_in) {
        if (!plug_in_f) {
            throw parameter_error("plug_in requires a scalar map (log or power)");
        }
        if (*plug_in_f == PlugInMap::power_map && !power_exponent) {
            throw parameter_error("plug_in power map requires an exponent");
        }
        if (*plug_in_f == PlugInMap::log_map && power_exponent) {
            throw parameter_error("plug_in log map does not take an exponent");
        }
    } else if (plug_in_f || power_exponent) {
        throw parameter_error(to_string(kind) + " does not take a plug-in map");
    }
}

void FunctionalSpec::validate_with_k(int k) const {
    validate();
    if (k < 1) {
        throw parameter_error("neighbor order k must be >= 1, got " + std::to_string(k));
    }
    if (kind == FunctionalKind::renyi_functional && !(k + 1.0 - *alpha > 0.0)) {
        throw parameter_error("renyi correction needs k + 1 - alpha > 0 (k = " +
                              std::to_string(k) + ", alpha = " + std::to_string(*alpha) + ")");
    }
    if (kind == FunctionalKind::alpha_divergence_functional) {
        if (!(k - *alpha + 1.0 > 0.0) || !(k + *alpha - 1.0 > 0.0)) {
            throw parameter_error(
                "alpha-divergence correction needs k - alpha + 1 > 0 and k + alpha - 1 > 0 "
                "(k = " + std::to_string(k) + ", alpha = " + std::to_string(*alpha) + ")");
        }
    }
}

std::string to_string(FunctionalKind kind) {
    switch (kind) {
        case FunctionalKind::shannon_entropy: return "shannon";
        case FunctionalKind::renyi_functional: return "renyi";
        case FunctionalKind::kl_divergence: return "kl";
        case FunctionalKind::alpha_divergence_functional: return "alpha-div";
        case FunctionalKind::plug_in: return "plugin";
    }
    return "unknown";
}

namespace {

// (k/n) / (c * eps^D); shared by every estimator so ratios between corrected
// and plug-in estimates reduce to their analytic constants exactly.
double density_from_distance(double eps, int k, std::size_t n, double ball_volume, int dim) {
    return (static_cast<double>(k) / static_cast<double>(n)) /
           (ball_volume * std::pow(eps, static_cast<double>(dim)));
}

void check_pair(const SampleSet& p, const SampleSet& q) {
    if (p.dimension() != q.dimension() || p.metric().order != q.metric().order) {
        throw dimension_error("divergence estimators need both samples to share dimension "
                              "and norm order");
    }
}

}  // namespace

double knn_density(const SampleSet& data, std::span<const double> query, int k,
                   std::optional<std::size_t> exclude_index) {
    const double eps = knn_distance(query, data, k, exclude_index);
    if (eps == 0.0) {
        throw degenerate_sample_error("knn_density: zero neighbor distance at the query point");
    }
    return density_from_distance(eps, k, data.size(), unit_ball_volume(data.metric()),
                                 data.dimension());
}

Estimate shannon_entropy(const SampleSet& data, int k) {
    const std::size_t n = data.size();
    if (n < 2) {
        throw cardinality_error("shannon_entropy needs at least 2 points");
    }
    const NeighborDistances eps = leave_one_out_distances(data, k);
    double sum_log = 0.0;
    for (double e : eps.values) {
        sum_log += std::log(e);
    }
    const double dim = static_cast<double>(data.dimension());
    const double value = digamma(static_cast<double>(n)) - digamma(static_cast<double>(k)) +
                         std::log(unit_ball_volume(data.metric())) +
                         dim / static_cast<double>(n) * sum_log;
    Estimate out;
    out.value = value;
    out.functional = FunctionalSpec::shannon();
    out.k = k;
    out.n = n;
    out.metric = data.metric();
    out.correction_description = "additive: psi(n) - psi(k) + log(k/n)";
    return out;
}

Estimate renyi_functional(const SampleSet& data, int k, double alpha) {
    const FunctionalSpec spec = FunctionalSpec::renyi(alpha);
    spec.validate_with_k(k);
    const std::size_t n = data.size();
    const NeighborDistances eps = leave_one_out_distances(data, k);
    const double volume = unit_ball_volume(data.metric());
    double sum = 0.0;
    for (double e : eps.values) {
        sum += std::pow(density_from_distance(e, k, n, volume, data.dimension()), alpha - 1.0);
    }
    const double correction =
        std::exp(log_gamma(static_cast<double>(k)) - log_gamma(k + 1.0 - alpha));
    Estimate out;
    out.value = correction * sum / static_cast<double>(n);
    out.functional = spec;
    out.k = k;
    out.n = n;
    out.metric = data.metric();
    out.correction_description = "multiplicative: Gamma(k) / Gamma(k+1-alpha)";
    out.renyi_entropy = std::log(out.value) / (1.0 - alpha);
    return out;
}

Estimate kl_divergence(const SampleSet& data_p, const SampleSet& data_q, int k) {
    check_pair(data_p, data_q);
    const std::size_t n = data_p.size();
    const std::size_t m = data_q.size();
    if (n < 2) {
        throw cardinality_error("kl_divergence needs at least 2 points in the first sample");
    }
    const NeighborDistances eps = leave_one_out_distances(data_p, k);
    const NeighborDistances delta = cross_distances(data_p, data_q, k);
    double sum_log_ratio = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sum_log_ratio += std::log(delta.values[i] / eps.values[i]);
    }
    const double dim = static_cast<double>(data_p.dimension());
    Estimate out;
    out.value = dim / static_cast<double>(n) * sum_log_ratio +
                std::log(static_cast<double>(m) / static_cast<double>(n - 1));
    out.functional = FunctionalSpec::kl();
    out.k = k;
    out.n = n;
    out.m = m;
    out.metric = data_p.metric();
    out.correction_description = "corrections for p and q cancel; constant log(m/(n-1))";
    return out;
}

Estimate alpha_divergence_functional(const SampleSet& data_p, const SampleSet& data_q, int k,
                                     double alpha) {
    const FunctionalSpec spec = FunctionalSpec::alpha_divergence(alpha);
    spec.validate_with_k(k);
    check_pair(data_p, data_q);
    const std::size_t n = data_p.size();
    const std::size_t m = data_q.size();
    if (n < 2) {
        throw cardinality_error(
            "alpha_divergence_functional needs at least 2 points in the first sample");
    }
    const NeighborDistances eps = leave_one_out_distances(data_p, k);
    const NeighborDistances delta = cross_distances(data_p, data_q, k);
    // phat/qhat = (m/n) * (delta/eps)^D: the ball volumes cancel algebraically,
    // so evaluate the ratio directly.
    const double size_ratio = static_cast<double>(m) / static_cast<double>(n);
    const double dim = static_cast<double>(data_p.dimension());
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double ratio = size_ratio * std::pow(delta.values[i] / eps.values[i], dim);
        sum += std::pow(ratio, alpha - 1.0);
    }
    const double correction = std::exp(2.0 * log_gamma(static_cast<double>(k)) -
                                       log_gamma(k - alpha + 1.0) - log_gamma(k + alpha - 1.0));
    Estimate out;
    out.value = correction * sum / static_cast<double>(n);
    out.functional = spec;
    out.k = k;
    out.n = n;
    out.m = m;
    out.metric = data_p.metric();
    out.correction_description =
        "multiplicative: Gamma(k)^2 / (Gamma(k-alpha+1) Gamma(k+alpha-1))";
    return out;
}

Estimate plug_in(const SampleSet& data, int k, const FunctionalSpec& spec) {
    if (spec.kind != FunctionalKind::plug_in) {
        throw parameter_error("plug_in called with a non-plug-in functional spec");
    }
    spec.validate_with_k(k);
    const std::size_t n = data.size();
    if (n < 2) {
        throw cardinality_error("plug_in needs at least 2 points");
    }
    const NeighborDistances eps = leave_one_out_distances(data, k);
    const double volume = unit_ball_volume(data.metric());
    double sum = 0.0;
    for (double e : eps.values) {
        const double density = density_from_distance(e, k, n, volume, data.dimension());
        sum += *spec.plug_in_f == PlugInMap::log_map ? std::log(density)
                                                     : std::pow(density, *spec.power_exponent);
    }
    Estimate out;
    out.value = sum / static_cast<double>(n);
    out.functional = spec;
    out.k = k;
    out.n = n;
    out.metric = data.metric();
    out.correction_description = "none";
    return out;
}

}  // namespace fixedk
