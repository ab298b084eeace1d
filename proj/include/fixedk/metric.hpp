#pragma once

#include <limits>
#include <span>
#include <vector>

namespace fixedk {

using Point = std::vector<double>;

// Distinguished norm order for the sup norm. Stored as IEEE infinity so it can
// never collide with a finite order; code must branch on is_sup_norm(), not on
// magnitude.
inline constexpr double kSupNorm = std::numeric_limits<double>::infinity();

// Dimension D >= 1 plus Minkowski norm order r in [1, inf].
struct MetricConfig {
    int dimension = 1;
    double order = 2.0;

    // Throws parameter_error when dimension < 1 or order < 1 (NaN included).
    void validate() const;
    bool is_sup_norm() const;
};

// r-norm distance between two D-dimensional points.
// Throws dimension_error if either span disagrees with config.dimension.
double norm_distance(std::span<const double> a, std::span<const double> b,
                     const MetricConfig& config);

// Lebesgue volume of the unit r-norm ball in dimension D:
//   c_{D,r} = (2 Gamma(1 + 1/r))^D / Gamma(1 + D/r),
// evaluated through log_gamma; the sup-norm case is hard-coded to 2^D.
double unit_ball_volume(const MetricConfig& config);

// Sup-norm distance from x to the boundary of the unit cube [0,1]^D:
// min_i min(x_i, 1 - x_i). Throws support_error if x is outside the cube.
double distance_to_boundary(std::span<const double> x, const MetricConfig& config);

}  // namespace fixedk
