#include "fixedk/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fixedk/errors.hpp"

namespace fixedk {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string_view trim(std::string_view text) {
    const char* ws = " \t\r\n";
    const std::size_t first = text.find_first_not_of(ws);
    if (first == std::string_view::npos) {
        return {};
    }
    const std::size_t last = text.find_last_not_of(ws);
    return text.substr(first, last - first + 1);
}

bool parse_double(std::string_view cell, double& value) {
    cell = trim(cell);
    if (cell.empty()) {
        return false;
    }
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    return ec == std::errc{} && ptr == end;
}

std::vector<std::string_view> split_cells(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return cells;
}

// Full round-trip precision for CSV cells.
std::string fmt(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

const char* fmt(bool value) { return value ? "true" : "false"; }

std::string order_label(const MetricConfig& metric) {
    return metric.is_sup_norm() ? std::string("inf") : fmt(metric.order);
}

ordered_json metric_json(const MetricConfig& metric) {
    ordered_json j;
    j["dimension"] = metric.dimension;
    if (metric.is_sup_norm()) {
        j["order"] = "inf";  // IEEE infinity is not representable in JSON
    } else {
        j["order"] = metric.order;
    }
    return j;
}

ordered_json functional_json(const FunctionalSpec& spec) {
    ordered_json j;
    j["kind"] = to_string(spec.kind);
    if (spec.alpha) {
        j["alpha"] = *spec.alpha;
    }
    if (spec.plug_in_f) {
        j["map"] = *spec.plug_in_f == PlugInMap::log_map ? "log" : "power";
    }
    if (spec.power_exponent) {
        j["power_exponent"] = *spec.power_exponent;
    }
    return j;
}

ordered_json fit_json(const std::optional<LineFit>& fit) {
    if (!fit) {
        return nullptr;
    }
    ordered_json j;
    j["slope"] = fit->slope;
    j["intercept"] = fit->intercept;
    return j;
}

const char* side_label(TailSide side) {
    return side == TailSide::upper ? "upper" : "lower";
}

void dump(std::ostream& out, const ordered_json& j) { out << j.dump(2) << '\n'; }

}  // namespace

SampleSet load_samples(const std::string& path, int dimension, const MetricConfig& metric,
                       bool allow_outside) {
    metric.validate();
    if (dimension != metric.dimension) {
        throw dimension_error("load_samples: requested dimension does not match the metric");
    }
    std::ifstream in(path);
    if (!in) {
        throw parse_error("load_samples: cannot open '" + path + "'");
    }

    std::vector<double> coords;
    std::string line;
    std::size_t line_number = 0;
    bool seen_first_row = false;
    while (std::getline(in, line)) {
        ++line_number;
        const std::string_view body = trim(line);
        if (body.empty()) {
            continue;
        }
        const std::vector<std::string_view> cells = split_cells(body);

        if (!seen_first_row) {
            seen_first_row = true;
            // Header auto-detection: a first row with any non-numeric cell is a
            // column-name row, not data.
            bool all_numeric = true;
            for (const std::string_view cell : cells) {
                double ignored = 0.0;
                if (!parse_double(cell, ignored)) {
                    all_numeric = false;
                    break;
                }
            }
            if (!all_numeric) {
                continue;
            }
        }

        if (static_cast<int>(cells.size()) != dimension) {
            throw parse_error("load_samples: expected " + std::to_string(dimension) +
                                  " columns, found " + std::to_string(cells.size()),
                              line_number);
        }
        for (const std::string_view cell : cells) {
            double value = 0.0;
            if (!parse_double(cell, value)) {
                throw parse_error("load_samples: non-numeric cell '" + std::string(cell) + "'",
                                  line_number);
            }
            if (!allow_outside && !(value >= 0.0 && value <= 1.0)) {
                throw support_error("load_samples: coordinate " + fmt(value) + " on line " +
                                    std::to_string(line_number) +
                                    " lies outside the unit cube [0,1]^" +
                                    std::to_string(dimension));
            }
            coords.push_back(value);
        }
    }
    if (coords.empty()) {
        throw parse_error("load_samples: '" + path + "' contains no data rows");
    }
    return SampleSet(metric, std::move(coords));
}

void emit(std::ostream& out, const Estimate& estimate, Format format) {
    if (format == Format::json) {
        ordered_json j;
        j["functional"] = functional_json(estimate.functional);
        j["k"] = estimate.k;
        j["n"] = estimate.n;
        if (estimate.m) {
            j["m"] = *estimate.m;
        }
        j["metric"] = metric_json(estimate.metric);
        j["value"] = estimate.value;
        if (estimate.renyi_entropy) {
            j["renyi_entropy"] = *estimate.renyi_entropy;
        }
        j["correction_description"] = estimate.correction_description;
        dump(out, j);
        return;
    }
    out << "functional,alpha,k,n,m,dimension,order,value,renyi_entropy\n";
    out << to_string(estimate.functional.kind) << ',';
    if (estimate.functional.alpha) {
        out << fmt(*estimate.functional.alpha);
    }
    out << ',' << estimate.k << ',' << estimate.n << ',';
    if (estimate.m) {
        out << *estimate.m;
    }
    out << ',' << estimate.metric.dimension << ',' << order_label(estimate.metric) << ','
        << fmt(estimate.value) << ',';
    if (estimate.renyi_entropy) {
        out << fmt(*estimate.renyi_entropy);
    }
    out << '\n';
}

void emit(std::ostream& out, const GroundTruthValue& truth, Format format) {
    const char* method = truth.method == TruthMethod::closed_form ? "closed_form" : "quadrature";
    if (format == Format::json) {
        ordered_json j;
        j["value"] = truth.value;
        j["method"] = method;
        j["error_bound"] = truth.error_bound;
        dump(out, j);
        return;
    }
    out << "value,method,error_bound\n";
    out << fmt(truth.value) << ',' << method << ',' << fmt(truth.error_bound) << '\n';
}

void emit(std::ostream& out, const SweepResult& result, Format format) {
    if (format == Format::json) {
        ordered_json j;
        j["functional"] = functional_json(result.config.functional);
        j["dist_p"] = to_string(result.config.dist_p);
        if (result.config.dist_q) {
            j["dist_q"] = to_string(*result.config.dist_q);
        }
        j["metric"] = metric_json(result.config.metric);
        j["ks"] = result.config.ks;
        j["n_grid"] = result.config.n_grid;
        j["trials"] = result.config.trials;
        j["seed"] = result.config.master_seed;
        if (result.config.expected_beta) {
            j["expected_beta"] = *result.config.expected_beta;
        }
        {
            ordered_json t;
            t["value"] = result.ground_truth.value;
            t["method"] = result.ground_truth.method == TruthMethod::closed_form
                              ? "closed_form"
                              : "quadrature";
            t["error_bound"] = result.ground_truth.error_bound;
            j["ground_truth"] = std::move(t);
        }
        ordered_json cells = ordered_json::array();
        for (const SweepCell& cell : result.cells) {
            ordered_json c;
            c["n"] = cell.n;
            c["k"] = cell.k;
            c["mean_estimate"] = cell.mean_estimate;
            c["bias"] = cell.bias;
            c["variance"] = cell.variance;
            c["mse"] = cell.mse;
            c["trials_used"] = cell.trials_used;
            c["trials_aborted"] = cell.trials_aborted;
            cells.push_back(std::move(c));
        }
        j["cells"] = std::move(cells);
        ordered_json fits = ordered_json::array();
        for (const ConvergenceFits& fit : result.fits) {
            ordered_json f;
            f["k"] = fit.k;
            f["abs_bias"] = fit_json(fit.bias_fit);
            f["variance"] = fit_json(fit.variance_fit);
            f["mse"] = fit_json(fit.mse_fit);
            fits.push_back(std::move(f));
        }
        j["fits"] = std::move(fits);
        dump(out, j);
        return;
    }
    out << "n,k,mean_estimate,bias,variance,mse,trials_used,trials_aborted\n";
    for (const SweepCell& cell : result.cells) {
        out << cell.n << ',' << cell.k << ',' << fmt(cell.mean_estimate) << ',' << fmt(cell.bias)
            << ',' << fmt(cell.variance) << ',' << fmt(cell.mse) << ',' << cell.trials_used << ','
            << cell.trials_aborted << '\n';
    }
}

void emit(std::ostream& out, const ConcentrationReport& report, Format format) {
    if (format == Format::json) {
        ordered_json j;
        j["n"] = report.n;
        j["k"] = report.k;
        j["dim"] = report.dim;
        j["trials"] = report.trials;
        j["seed"] = report.seed;
        j["all_pass"] = report.all_pass();
        ordered_json rows = ordered_json::array();
        for (const ConcentrationRow& row : report.rows) {
            ordered_json r;
            r["radius"] = row.radius;
            r["side"] = side_label(row.side);
            r["skipped"] = row.skipped;
            if (!row.skipped) {
                r["empirical_tail"] = row.empirical_tail;
                r["analytic_bound"] = row.analytic_bound;
                r["standard_error"] = row.standard_error;
                r["pass"] = row.pass;
            }
            rows.push_back(std::move(r));
        }
        j["rows"] = std::move(rows);
        dump(out, j);
        return;
    }
    out << "radius,side,skipped,empirical_tail,analytic_bound,standard_error,pass\n";
    for (const ConcentrationRow& row : report.rows) {
        out << fmt(row.radius) << ',' << side_label(row.side) << ',' << fmt(row.skipped) << ',';
        if (row.skipped) {
            out << ",,,\n";
        } else {
            out << fmt(row.empirical_tail) << ',' << fmt(row.analytic_bound) << ','
                << fmt(row.standard_error) << ',' << fmt(row.pass) << '\n';
        }
    }
}

void emit(std::ostream& out, const ErlangReport& report, Format format) {
    if (format == Format::json) {
        ordered_json j;
        j["n"] = report.n;
        j["k"] = report.k;
        j["dim"] = report.dim;
        j["trials"] = report.trials;
        j["seed"] = report.seed;
        j["query"] = report.query;
        j["ks_statistic"] = report.ks_statistic;
        j["trials_used"] = report.trials_used;
        j["trials_discarded"] = report.trials_discarded;
        dump(out, j);
        return;
    }
    out << "n,k,dim,trials,seed,ks_statistic,trials_used,trials_discarded\n";
    out << report.n << ',' << report.k << ',' << report.dim << ',' << report.trials << ','
        << report.seed << ',' << fmt(report.ks_statistic) << ',' << report.trials_used << ','
        << report.trials_discarded << '\n';
}

void emit(std::ostream& out, const MomentBoundReport& report, Format format) {
    if (format == Format::json) {
        ordered_json j;
        j["n"] = report.n;
        j["k"] = report.k;
        j["dim"] = report.dim;
        j["trials"] = report.trials;
        j["seed"] = report.seed;
        j["alpha"] = report.alpha;
        j["empirical_moment"] = report.empirical_moment;
        j["analytic_bound"] = report.analytic_bound;
        j["standard_error"] = report.standard_error;
        j["pass"] = report.pass;
        dump(out, j);
        return;
    }
    out << "n,k,dim,trials,seed,alpha,empirical_moment,analytic_bound,standard_error,pass\n";
    out << report.n << ',' << report.k << ',' << report.dim << ',' << report.trials << ','
        << report.seed << ',' << fmt(report.alpha) << ',' << fmt(report.empirical_moment) << ','
        << fmt(report.analytic_bound) << ',' << fmt(report.standard_error) << ','
        << fmt(report.pass) << '\n';
}

}  // namespace fixedk
