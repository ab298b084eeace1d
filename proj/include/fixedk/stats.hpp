#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "fixedk/errors.hpp"

namespace fixedk {

// Mean and unbiased (n-1) variance, accumulated in input order (two-pass) so
// results are independent of any parallel schedule that filled the buffer.
struct MeanVariance {
    double mean = 0.0;
    double variance = 0.0;
};

inline MeanVariance mean_and_variance(std::span<const double> values) {
    if (values.size() < 2) {
        throw cardinality_error("mean_and_variance needs at least 2 values");
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    const double mean = sum / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) {
        const double d = v - mean;
        ss += d * d;
    }
    return {mean, ss / static_cast<double>(values.size() - 1)};
}

// Kolmogorov-Smirnov distance between the empirical CDF of `samples` and a
// reference CDF. Sorts a copy of the samples.
inline double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) {
        throw cardinality_error("ks_distance needs at least one sample");
    }
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double ks = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        ks = std::max(ks, std::fabs(f - static_cast<double>(i) / n));
        ks = std::max(ks, std::fabs(static_cast<double>(i + 1) / n - f));
    }
    return ks;
}

}  // namespace fixedk
