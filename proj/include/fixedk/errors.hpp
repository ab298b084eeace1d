#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fixedk {

// Mismatched point/sample dimensions, or incompatible metrics between sample sets.
struct dimension_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A point lies outside the unit cube where in-support coordinates were required.
struct support_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Not enough points for the requested neighbor order (k >= usable sample size, etc.).
struct cardinality_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// An estimator needed a strictly positive neighbor distance but the sample
// contains exact duplicates (log 0 / division by zero).
struct degenerate_sample_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid parameter combination (alpha = 1, gamma argument <= 0, bad config, ...).
struct parameter_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Malformed input text. For file input carries the 1-based line number of the
// offending row (0 when the input is not line-oriented, e.g. an option string).
struct parse_error : std::runtime_error {
    explicit parse_error(const std::string& what) : std::runtime_error(what), line(0) {}
    parse_error(const std::string& what, std::size_t line_number)
        : std::runtime_error(what + " (line " + std::to_string(line_number) + ")"),
          line(line_number) {}
    std::size_t line;
};

// A numeric routine could not reach its accuracy target; carries the achieved bound.
struct numeric_error : std::runtime_error {
    numeric_error(const std::string& what, double achieved)
        : std::runtime_error(what + " (achieved error bound " + std::to_string(achieved) + ")"),
          achieved_bound(achieved) {}
    double achieved_bound;
};

// A Monte Carlo check ended with no usable trials.
struct insufficient_data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A rate sweep had too many aborted trials at some grid point.
struct sweep_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace fixedk
