#include "fixedk/distributions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>

#include "fixedk/errors.hpp"
#include "fixedk/rng.hpp"
#include "fixedk/special_functions.hpp"

namespace fixedk {

void DistributionSpec::validate() const {
    if (components.empty()) {
        throw parameter_error("distribution spec needs at least one coordinate");
    }
    for (const BetaComponent& c : components) {
        if (c.a < 1 || c.b < 1) {
            throw parameter_error("beta shape parameters must be integers >= 1, got beta:" +
                                  std::to_string(c.a) + "," + std::to_string(c.b));
        }
    }
}

bool DistributionSpec::is_uniform() const {
    return std::all_of(components.begin(), components.end(),
                       [](const BetaComponent& c) { return c.a == 1 && c.b == 1; });
}

namespace {

int parse_positive_int(std::string_view text, const char* what) {
    int value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || value < 1) {
        throw parse_error(std::string("distribution spec: expected positive integer ") + what +
                          ", got '" + std::string(text) + "'");
    }
    return value;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    return s;
}

}  // namespace

DistributionSpec parse_distribution_spec(std::string_view text) {
    DistributionSpec spec;
    std::string_view rest = text;
    if (trim(rest).empty()) {
        throw parse_error("distribution spec: empty string");
    }
    while (true) {
        const std::size_t cut = rest.find('x');
        std::string_view group = trim(rest.substr(0, cut));

        int repeat = 1;
        if (const std::size_t caret = group.find('^'); caret != std::string_view::npos) {
            repeat = parse_positive_int(trim(group.substr(caret + 1)), "repeat count");
            group = trim(group.substr(0, caret));
        }

        BetaComponent component;
        if (group == "uniform") {
            component = {1, 1};
        } else if (group.rfind("beta:", 0) == 0) {
            const std::string_view params = group.substr(5);
            const std::size_t comma = params.find(',');
            if (comma == std::string_view::npos) {
                throw parse_error("distribution spec: expected 'beta:a,b', got '" +
                                  std::string(group) + "'");
            }
            component.a = parse_positive_int(trim(params.substr(0, comma)), "a");
            component.b = parse_positive_int(trim(params.substr(comma + 1)), "b");
        } else {
            throw parse_error("distribution spec: unknown coordinate '" + std::string(group) +
                              "' (expected 'beta:a,b' or 'uniform')");
        }
        spec.components.insert(spec.components.end(), repeat, component);

        if (cut == std::string_view::npos) {
            break;
        }
        rest = rest.substr(cut + 1);
        if (trim(rest).empty()) {
            throw parse_error("distribution spec: trailing 'x' separator");
        }
    }
    spec.validate();
    return spec;
}

std::string to_string(const DistributionSpec& spec) {
    std::string out;
    for (std::size_t i = 0; i < spec.components.size(); ++i) {
        if (i > 0) {
            out += 'x';
        }
        const BetaComponent& c = spec.components[i];
        if (c.a == 1 && c.b == 1) {
            out += "uniform";
        } else {
            out += "beta:" + std::to_string(c.a) + "," + std::to_string(c.b);
        }
    }
    return out;
}

SampleSet sample(const DistributionSpec& spec, std::size_t n, std::uint64_t seed,
                 std::optional<MetricConfig> metric) {
    spec.validate();
    if (n < 1) {
        throw cardinality_error("sample: n must be >= 1");
    }
    const MetricConfig config = metric.value_or(MetricConfig{spec.dimension(), 2.0});
    if (config.dimension != spec.dimension()) {
        throw dimension_error("sample: metric dimension " + std::to_string(config.dimension) +
                              " does not match distribution dimension " +
                              std::to_string(spec.dimension()));
    }
    CounterRng rng(seed);
    std::vector<double> coords;
    coords.reserve(n * spec.components.size());
    std::vector<double> buffer;
    for (std::size_t i = 0; i < n; ++i) {
        for (const BetaComponent& c : spec.components) {
            // Beta(a, b) with integer shapes: a-th order statistic of a+b-1 uniforms.
            const int m = c.a + c.b - 1;
            buffer.resize(static_cast<std::size_t>(m));
            for (double& u : buffer) {
                u = rng.next_unit();
            }
            std::nth_element(buffer.begin(), buffer.begin() + (c.a - 1), buffer.end());
            coords.push_back(buffer[static_cast<std::size_t>(c.a - 1)]);
        }
    }
    return SampleSet(config, std::move(coords));
}

namespace {

double log_beta_pdf(double x, const BetaComponent& c) {
    double lg = -log_beta(c.a, c.b);
    if (c.a > 1) {
        lg += (c.a - 1) * std::log(x);
    }
    if (c.b > 1) {
        lg += (c.b - 1) * std::log(1.0 - x);
    }
    return lg;
}

// ---- adaptive Gauss-Kronrod (7, 15) quadrature on a subinterval ------------

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
};

// QUADPACK dqk15 nodes and weights (positive half; node 7 is the midpoint).
constexpr double kKronrodNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000,
};
constexpr double kKronrodWeights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728,
};
constexpr double kGaussWeights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469,
};

QuadResult gauss_kronrod_panel(const std::function<double(double)>& f, double lo, double hi) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double f_center = f(center);
    double kronrod = kKronrodWeights[7] * f_center;
    double gauss = kGaussWeights[3] * f_center;
    for (int i = 0; i < 7; ++i) {
        const double offset = half * kKronrodNodes[i];
        const double pair = f(center - offset) + f(center + offset);
        kronrod += kKronrodWeights[i] * pair;
        if (i % 2 == 1) {
            gauss += kGaussWeights[i / 2] * pair;
        }
    }
    return {kronrod * half, std::fabs(kronrod - gauss) * half};
}

struct Panel {
    double lo = 0.0, hi = 0.0;
    double value = 0.0, error = 0.0;
};

struct PanelLessError {
    bool operator()(const Panel& a, const Panel& b) const { return a.error < b.error; }
};

// Absolute-tolerance adaptive integral over (0, 1); nodes stay interior, so
// integrable endpoint behavior (log or algebraic) is never evaluated at 0/1.
// Worst-first bisection: always split the panel with the largest error
// estimate until the summed error meets abs_tol. The split budget bounds the
// runtime on non-integrable inputs, which then simply report a large error
// bound instead of refining forever.
QuadResult integrate_unit(const std::function<double(double)>& f, double abs_tol) {
    constexpr int kMaxSplits = 20000;
    constexpr double kMinWidth = 1e-14;
    auto panel_of = [&](double lo, double hi) {
        const QuadResult r = gauss_kronrod_panel(f, lo, hi);
        const double err = std::isnan(r.error) ? std::numeric_limits<double>::infinity()
                                               : r.error;
        return Panel{lo, hi, r.value, err};
    };

    std::priority_queue<Panel, std::vector<Panel>, PanelLessError> splittable;
    QuadResult frozen;  // panels at minimum width, excluded from refinement
    const Panel root = panel_of(0.0, 1.0);
    double queued_error = root.error;
    splittable.push(root);

    for (int splits = 0; splits < kMaxSplits && !splittable.empty(); ++splits) {
        if (queued_error + frozen.error <= abs_tol) {
            break;
        }
        const Panel worst = splittable.top();
        splittable.pop();
        queued_error -= worst.error;
        if (worst.hi - worst.lo <= kMinWidth) {
            frozen.value += worst.value;
            frozen.error += worst.error;
            continue;
        }
        const double mid = 0.5 * (worst.lo + worst.hi);
        for (const Panel& child : {panel_of(worst.lo, mid), panel_of(mid, worst.hi)}) {
            queued_error += child.error;
            splittable.push(child);
        }
    }

    QuadResult total = frozen;
    while (!splittable.empty()) {
        total.value += splittable.top().value;
        total.error += splittable.top().error;
        splittable.pop();
    }
    return total;
}

constexpr double kQuadCoordinateTol = 1e-10;
constexpr double kQuadReportedBound = 1e-8;

// ---- closed forms per coordinate -------------------------------------------

double beta_shannon_entropy(const BetaComponent& c) {
    const double ab = static_cast<double>(c.a + c.b);
    return log_beta(c.a, c.b) - (c.a - 1) * (digamma(c.a) - digamma(ab)) -
           (c.b - 1) * (digamma(c.b) - digamma(ab));
}

double beta_kl(const BetaComponent& p, const BetaComponent& q) {
    const double ab = static_cast<double>(p.a + p.b);
    return log_beta(q.a, q.b) - log_beta(p.a, p.b) + (p.a - q.a) * digamma(p.a) +
           (p.b - q.b) * digamma(p.b) + (q.a - p.a + q.b - p.b) * digamma(ab);
}

// integral p^alpha over one coordinate: B(alpha(a-1)+1, alpha(b-1)+1) / B(a,b)^alpha.
bool beta_power_integrable(const BetaComponent& c, double alpha, double* u, double* v) {
    *u = alpha * (c.a - 1) + 1.0;
    *v = alpha * (c.b - 1) + 1.0;
    return *u > 0.0 && *v > 0.0;
}

// integral p^alpha q^(1-alpha) over one coordinate.
bool beta_cross_power_integrable(const BetaComponent& p, const BetaComponent& q, double alpha,
                                 double* u, double* v) {
    *u = alpha * (p.a - 1) + (1.0 - alpha) * (q.a - 1) + 1.0;
    *v = alpha * (p.b - 1) + (1.0 - alpha) * (q.b - 1) + 1.0;
    return *u > 0.0 && *v > 0.0;
}

GroundTruthValue product_of_integrals(const std::vector<QuadResult>& factors) {
    GroundTruthValue out;
    out.method = TruthMethod::quadrature;
    out.value = 1.0;
    for (const QuadResult& f : factors) {
        out.value *= f.value;
    }
    for (std::size_t j = 0; j < factors.size(); ++j) {
        double cross = factors[j].error;
        for (std::size_t i = 0; i < factors.size(); ++i) {
            if (i != j) {
                cross *= std::fabs(factors[i].value);
            }
        }
        out.error_bound += cross;
    }
    return out;
}

void require_quadrature_bound(GroundTruthValue& truth) {
    if (!(truth.error_bound <= kQuadReportedBound)) {
        throw numeric_error("quadrature did not reach the required accuracy",
                            truth.error_bound);
    }
}

}  // namespace

GroundTruthValue true_functional(const DistributionSpec& p,
                                 const std::optional<DistributionSpec>& q,
                                 const FunctionalSpec& functional,
                                 std::optional<TruthMethod> force) {
    p.validate();
    functional.validate();
    if (functional.is_divergence()) {
        if (!q) {
            throw parameter_error(to_string(functional.kind) +
                                  " ground truth requires a second distribution");
        }
        q->validate();
        if (q->dimension() != p.dimension()) {
            throw dimension_error("ground truth: distribution dimensions differ");
        }
    } else if (q) {
        throw parameter_error(to_string(functional.kind) +
                              " ground truth does not take a second distribution");
    }

    // The plug-in estimator targets the same functionals without correction:
    // f = log targets E[log p] = -H(p), f = power(e) targets E[p^e].
    if (functional.kind == FunctionalKind::plug_in) {
        if (*functional.plug_in_f == PlugInMap::log_map) {
            GroundTruthValue truth =
                true_functional(p, std::nullopt, FunctionalSpec::shannon(), force);
            truth.value = -truth.value;
            return truth;
        }
        return true_functional(p, std::nullopt,
                               FunctionalSpec::renyi(*functional.power_exponent + 1.0), force);
    }

    const bool want_quadrature = force && *force == TruthMethod::quadrature;

    switch (functional.kind) {
        case FunctionalKind::shannon_entropy: {
            GroundTruthValue out;
            if (!want_quadrature) {
                for (const BetaComponent& c : p.components) {
                    out.value += beta_shannon_entropy(c);
                }
                return out;
            }
            out.method = TruthMethod::quadrature;
            for (const BetaComponent& c : p.components) {
                const QuadResult h = integrate_unit(
                    [&c](double x) {
                        const double lp = log_beta_pdf(x, c);
                        return -std::exp(lp) * lp;
                    },
                    kQuadCoordinateTol);
                out.value += h.value;
                out.error_bound += h.error;
            }
            require_quadrature_bound(out);
            return out;
        }
        case FunctionalKind::kl_divergence: {
            GroundTruthValue out;
            if (!want_quadrature) {
                for (int i = 0; i < p.dimension(); ++i) {
                    out.value += beta_kl(p.components[i], q->components[i]);
                }
                return out;
            }
            out.method = TruthMethod::quadrature;
            for (int i = 0; i < p.dimension(); ++i) {
                const BetaComponent& cp = p.components[i];
                const BetaComponent& cq = q->components[i];
                const QuadResult term = integrate_unit(
                    [&](double x) {
                        const double lp = log_beta_pdf(x, cp);
                        return std::exp(lp) * (lp - log_beta_pdf(x, cq));
                    },
                    kQuadCoordinateTol);
                out.value += term.value;
                out.error_bound += term.error;
            }
            require_quadrature_bound(out);
            return out;
        }
        case FunctionalKind::renyi_functional: {
            const double alpha = *functional.alpha;
            bool closed_ok = true;
            double log_value = 0.0;
            for (const BetaComponent& c : p.components) {
                double u, v;
                if (!beta_power_integrable(c, alpha, &u, &v)) {
                    closed_ok = false;
                    break;
                }
                log_value += log_beta(u, v) - alpha * log_beta(c.a, c.b);
            }
            if (closed_ok && !want_quadrature) {
                return {std::exp(log_value), TruthMethod::closed_form, 0.0};
            }
            if (force && *force == TruthMethod::closed_form) {
                throw parameter_error("renyi ground truth: closed form unavailable for alpha = " +
                                      std::to_string(alpha));
            }
            std::vector<QuadResult> factors;
            for (const BetaComponent& c : p.components) {
                factors.push_back(integrate_unit(
                    [&](double x) { return std::exp(alpha * log_beta_pdf(x, c)); },
                    kQuadCoordinateTol));
            }
            GroundTruthValue out = product_of_integrals(factors);
            require_quadrature_bound(out);
            return out;
        }
        case FunctionalKind::alpha_divergence_functional: {
            const double alpha = *functional.alpha;
            bool closed_ok = true;
            double log_value = 0.0;
            for (int i = 0; i < p.dimension(); ++i) {
                const BetaComponent& cp = p.components[i];
                const BetaComponent& cq = q->components[i];
                double u, v;
                if (!beta_cross_power_integrable(cp, cq, alpha, &u, &v)) {
                    closed_ok = false;
                    break;
                }
                log_value += log_beta(u, v) - alpha * log_beta(cp.a, cp.b) -
                             (1.0 - alpha) * log_beta(cq.a, cq.b);
            }
            if (closed_ok && !want_quadrature) {
                return {std::exp(log_value), TruthMethod::closed_form, 0.0};
            }
            if (force && *force == TruthMethod::closed_form) {
                throw parameter_error(
                    "alpha-divergence ground truth: closed form unavailable for alpha = " +
                    std::to_string(alpha));
            }
            std::vector<QuadResult> factors;
            for (int i = 0; i < p.dimension(); ++i) {
                const BetaComponent& cp = p.components[i];
                const BetaComponent& cq = q->components[i];
                factors.push_back(integrate_unit(
                    [&](double x) {
                        return std::exp(alpha * log_beta_pdf(x, cp) +
                                        (1.0 - alpha) * log_beta_pdf(x, cq));
                    },
                    kQuadCoordinateTol));
            }
            GroundTruthValue out = product_of_integrals(factors);
            require_quadrature_bound(out);
            return out;
        }
        case FunctionalKind::plug_in:
            break;  // handled above
    }
    throw parameter_error("unsupported functional for ground truth");
}

double density_at(const DistributionSpec& spec, std::span<const double> x) {
    spec.validate();
    if (x.size() != static_cast<std::size_t>(spec.dimension())) {
        throw dimension_error("density_at: point dimension " + std::to_string(x.size()) +
                              " does not match distribution dimension " +
                              std::to_string(spec.dimension()));
    }
    double log_density = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] >= 0.0 && x[i] <= 1.0)) {
            throw support_error("density_at: coordinate " + std::to_string(i) + " = " +
                                std::to_string(x[i]) + " lies outside [0,1]");
        }
        log_density += log_beta_pdf(x[i], spec.components[i]);
    }
    return std::exp(log_density);
}

}  // namespace fixedk
