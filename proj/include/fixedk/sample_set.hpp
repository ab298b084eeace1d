#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fixedk/errors.hpp"
#include "fixedk/metric.hpp"

namespace fixedk {

// Immutable collection of n >= 1 points stored row-major, tagged with the
// metric under which neighbor distances are measured.
class SampleSet {
  public:
    SampleSet(MetricConfig metric, std::vector<double> coords)
        : metric_(metric), coords_(std::move(coords)) {
        metric_.validate();
        const std::size_t d = static_cast<std::size_t>(metric_.dimension);
        if (coords_.empty() || coords_.size() % d != 0) {
            throw dimension_error("SampleSet: coordinate count " + std::to_string(coords_.size()) +
                                  " is not a positive multiple of dimension " + std::to_string(d));
        }
        size_ = coords_.size() / d;
    }

    static SampleSet from_points(MetricConfig metric, const std::vector<Point>& points) {
        std::vector<double> coords;
        coords.reserve(points.size() * static_cast<std::size_t>(metric.dimension));
        for (const Point& p : points) {
            if (p.size() != static_cast<std::size_t>(metric.dimension)) {
                throw dimension_error("SampleSet: point dimension " + std::to_string(p.size()) +
                                      " does not match metric dimension " +
                                      std::to_string(metric.dimension));
            }
            coords.insert(coords.end(), p.begin(), p.end());
        }
        return SampleSet(metric, std::move(coords));
    }

    std::size_t size() const { return size_; }
    int dimension() const { return metric_.dimension; }
    const MetricConfig& metric() const { return metric_; }

    std::span<const double> point(std::size_t i) const {
        const std::size_t d = static_cast<std::size_t>(metric_.dimension);
        return {coords_.data() + i * d, d};
    }

    const std::vector<double>& coords() const { return coords_; }

    // True when every coordinate lies in [0,1].
    bool in_unit_cube() const {
        for (double c : coords_) {
            if (!(c >= 0.0 && c <= 1.0)) {
                return false;
            }
        }
        return true;
    }

  private:
    MetricConfig metric_;
    std::vector<double> coords_;
    std::size_t size_ = 0;
};

}  // namespace fixedk
