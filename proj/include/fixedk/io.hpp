#pragma once

#include <iosfwd>
#include <string>

#include "fixedk/distributions.hpp"
#include "fixedk/estimators.hpp"
#include "fixedk/metric.hpp"
#include "fixedk/sample_set.hpp"
#include "fixedk/sweep.hpp"
#include "fixedk/theory_checks.hpp"

namespace fixedk {

// Loads a sample set from a CSV file: one point per row, exactly `dimension`
// comma-separated numeric columns, blank lines skipped, an optional header row
// auto-detected (first row with any non-numeric cell). Throws parse_error
// (with the 1-based line number) on malformed rows and support_error when a
// coordinate falls outside [0,1] unless `allow_outside` is set.
SampleSet load_samples(const std::string& path, int dimension, const MetricConfig& metric,
                       bool allow_outside = false);

enum class Format { json, csv };

// Serializers for every result type the CLI can produce. JSON output is a
// pretty-printed object (trailing newline); CSV output is a header row plus
// data rows with full round-trip precision. Each writer is a pure function of
// its argument, so repeated calls yield byte-identical output.
void emit(std::ostream& out, const Estimate& estimate, Format format);
void emit(std::ostream& out, const GroundTruthValue& truth, Format format);
void emit(std::ostream& out, const SweepResult& result, Format format);
void emit(std::ostream& out, const ConcentrationReport& report, Format format);
void emit(std::ostream& out, const ErlangReport& report, Format format);
void emit(std::ostream& out, const MomentBoundReport& report, Format format);

}  // namespace fixedk
