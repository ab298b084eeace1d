#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fixedk/estimators.hpp"
#include "fixedk/metric.hpp"
#include "fixedk/sample_set.hpp"

namespace fixedk {

// One coordinate of a product-of-Beta distribution; integer shape parameters
// a, b >= 1 keep exact order-statistic sampling and closed-form moments.
struct BetaComponent {
    int a = 1;
    int b = 1;
};

// Product distribution prod_i Beta(a_i, b_i) on the unit cube [0,1]^D.
struct DistributionSpec {
    std::vector<BetaComponent> components;

    int dimension() const { return static_cast<int>(components.size()); }
    // Throws parameter_error when empty or any shape parameter < 1.
    void validate() const;
    bool is_uniform() const;
};

// Grammar: coordinate specs joined by 'x', each "beta:a,b" or "uniform"
// (= beta:1,1), with an optional "^N" repeat suffix on the final group,
// e.g. "beta:2,2x uniform", "beta:2,2^4", "uniform^3". Throws parse_error.
DistributionSpec parse_distribution_spec(std::string_view text);
std::string to_string(const DistributionSpec& spec);

// Draw n points. Beta(a, b) with integer parameters is sampled exactly as the
// a-th smallest of a+b-1 uniforms from a counter-based stream, so the result
// is a pure function of (spec, n, seed). The sample set is tagged with
// `metric` (default: Euclidean in the spec's dimension).
SampleSet sample(const DistributionSpec& spec, std::size_t n, std::uint64_t seed,
                 std::optional<MetricConfig> metric = std::nullopt);

// Density at an in-support point; throws support_error outside the cube.
double density_at(const DistributionSpec& spec, std::span<const double> x);

enum class TruthMethod { closed_form, quadrature };

struct GroundTruthValue {
    double value = 0.0;
    TruthMethod method = TruthMethod::closed_form;
    double error_bound = 0.0;  // 0 for closed forms; quadrature guarantees <= 1e-8
};

// Exact value of the functional for product-of-Beta distributions. Closed
// forms via log-gamma/digamma identities when their parameter positivity
// preconditions hold, otherwise adaptive per-coordinate Gauss-Kronrod
// quadrature (the method actually used is reported). `force` pins the method,
// for cross-checking. Divergences require q with p's dimension.
// Throws parameter_error on shape errors, numeric_error when quadrature
// cannot certify 1e-8 accuracy.
GroundTruthValue true_functional(const DistributionSpec& p,
                                 const std::optional<DistributionSpec>& q,
                                 const FunctionalSpec& functional,
                                 std::optional<TruthMethod> force = std::nullopt);

}  // namespace fixedk
