#include "fixedk/metric.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fixedk/errors.hpp"
#include "fixedk/special_functions.hpp"

namespace fixedk {

void MetricConfig::validate() const {
    if (dimension < 1) {
        throw parameter_error("metric dimension must be >= 1, got " + std::to_string(dimension));
    }
    if (!(order >= 1.0)) {  // rejects NaN and r < 1
        throw parameter_error("norm order must be >= 1 or infinity, got " + std::to_string(order));
    }
}

bool MetricConfig::is_sup_norm() const {
    return std::isinf(order);
}

double norm_distance(std::span<const double> a, std::span<const double> b,
                     const MetricConfig& config) {
    const std::size_t d = static_cast<std::size_t>(config.dimension);
    if (a.size() != d || b.size() != d) {
        throw dimension_error("norm_distance: point dimension " + std::to_string(a.size()) + "/" +
                              std::to_string(b.size()) + " does not match metric dimension " +
                              std::to_string(config.dimension));
    }
    if (config.is_sup_norm()) {
        double m = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            m = std::max(m, std::fabs(a[i] - b[i]));
        }
        return m;
    }
    if (config.order == 1.0) {
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            s += std::fabs(a[i] - b[i]);
        }
        return s;
    }
    if (config.order == 2.0) {
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double diff = a[i] - b[i];
            s += diff * diff;
        }
        return std::sqrt(s);
    }
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        s += std::pow(std::fabs(a[i] - b[i]), config.order);
    }
    return std::pow(s, 1.0 / config.order);
}

double unit_ball_volume(const MetricConfig& config) {
    config.validate();
    if (config.is_sup_norm()) {
        return std::ldexp(1.0, config.dimension);  // exact 2^D
    }
    const double d = static_cast<double>(config.dimension);
    const double inv_r = 1.0 / config.order;
    const double log_volume =
        d * (std::log(2.0) + log_gamma(1.0 + inv_r)) - log_gamma(1.0 + d * inv_r);
    return std::exp(log_volume);
}

double distance_to_boundary(std::span<const double> x, const MetricConfig& config) {
    const std::size_t d = static_cast<std::size_t>(config.dimension);
    if (x.size() != d) {
        throw dimension_error("distance_to_boundary: point dimension " + std::to_string(x.size()) +
                              " does not match metric dimension " + std::to_string(config.dimension));
    }
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < d; ++i) {
        if (!(x[i] >= 0.0 && x[i] <= 1.0)) {
            throw support_error("distance_to_boundary: coordinate " + std::to_string(i) + " = " +
                                std::to_string(x[i]) + " lies outside [0,1]");
        }
        m = std::min(m, std::min(x[i], 1.0 - x[i]));
    }
    return m;
}

}  // namespace fixedk
