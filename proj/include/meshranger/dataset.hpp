#pragma once

// Labelled feature matrices: synthetic per-class Gaussian generation, eval-matrix
// resampling and the CSV exchange format.
//
// CSV layout: optional leading "# ..." provenance lines, a header of the
// feature names followed by "label", then one row per sample with the class
// name in the last field. Numbers use the shortest decimal form that parses
// back to the same double.

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "core.hpp"
#include "random.hpp"
#include "target_catalog.hpp"

namespace meshranger {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct TrainingSet {
    Matrix features;                      ///< one row per sample
    std::vector<std::size_t> labels;      ///< class index per row
    std::vector<std::string> class_names; ///< index -> name

    std::size_t size() const { return labels.size(); }
    std::size_t dims() const { return static_cast<std::size_t>(features.cols()); }
    std::size_t class_count() const { return class_names.size(); }
};

inline std::vector<std::string> catalog_class_names() {
    std::vector<std::string> names;
    for (const auto& c : class_catalog()) names.emplace_back(c.name);
    return names;
}

inline void validate(const TrainingSet& set) {
    require(set.features.rows() == static_cast<Eigen::Index>(set.labels.size()), "training set: row/label count mismatch");
    for (auto y : set.labels) require(y < set.class_names.size(), "training set: label out of range");
}

/// Bound on redraws of a negative value for a nonnegative feature before clamping to 0.
inline constexpr int kNegativeRedraws = 10;

/// k samples per class, rows grouped by class in spec order. Class c draws
/// from its own sub-stream derive_seed(seed, c).
inline TrainingSet synthesize_dataset(std::span<const ClassSpec> specs, std::size_t k, std::uint64_t seed) {
    require(k >= 1, "synthesize_dataset: k must be >= 1");
    require(!specs.empty(), "synthesize_dataset: no classes");
    TrainingSet set;
    set.features.resize(static_cast<Eigen::Index>(specs.size() * k), kFeatureCount);
    set.labels.reserve(specs.size() * k);
    for (std::size_t c = 0; c < specs.size(); ++c) {
        set.class_names.emplace_back(specs[c].name);
        Rng rng(derive_seed(seed, c));
        for (std::size_t n = 0; n < k; ++n) {
            const auto row = static_cast<Eigen::Index>(c * k + n);
            for (std::size_t f = 0; f < kFeatureCount; ++f) {
                const auto& stats = specs[c].features[f];
                double v = 0.0;
                if (stats) {
                    v = rng.normal(stats->mean, stats->stddev);
                    if (feature_nonnegative(f)) {
                        for (int r = 0; r < kNegativeRedraws && v < 0.0; ++r) v = rng.normal(stats->mean, stats->stddev);
                        v = std::max(v, 0.0);
                    }
                }
                set.features(row, static_cast<Eigen::Index>(f)) = v;
            }
            set.labels.push_back(c);
        }
    }
    return set;
}

inline TrainingSet synthesize_dataset(std::size_t k, std::uint64_t seed) {
    const auto& table = class_catalog();
    return synthesize_dataset(std::span<const ClassSpec>(table.data(), table.size()), k, seed);
}

/// Resamples k' rows to k rows by per-column linear interpolation over a
/// uniform index grid. First and last rows are kept; k' = 1 replicates.
inline Matrix interpolate_eval(const Matrix& eval, std::size_t k) {
    require(eval.rows() >= 1, "interpolate_eval: eval matrix has no rows");
    require(k >= 1, "interpolate_eval: k must be >= 1");
    const auto src = static_cast<std::size_t>(eval.rows());
    Matrix out(static_cast<Eigen::Index>(k), eval.cols());
    for (std::size_t r = 0; r < k; ++r) {
        if (src == 1 || k == 1) {
            out.row(static_cast<Eigen::Index>(r)) = eval.row(0);
            continue;
        }
        if (r == k - 1) {
            out.row(static_cast<Eigen::Index>(r)) = eval.row(static_cast<Eigen::Index>(src - 1));
            continue;
        }
        const double u = static_cast<double>(r) * static_cast<double>(src - 1) / static_cast<double>(k - 1);
        const auto lo = static_cast<std::size_t>(u);
        const double frac = u - static_cast<double>(lo);
        const auto a = eval.row(static_cast<Eigen::Index>(lo));
        const auto b = eval.row(static_cast<Eigen::Index>(std::min(lo + 1, src - 1)));
        out.row(static_cast<Eigen::Index>(r)) = a + frac * (b - a);
    }
    return out;
}

inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace detail {

inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline double parse_double(std::string_view s, std::size_t line_no) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw InvalidArgument("csv line " + std::to_string(line_no) + ": bad number '" + std::string(s) + "'");
    return v;
}

}  // namespace detail

/// Writes an 11-feature set. Each provenance entry becomes a "# " line.
inline void write_training_csv(std::ostream& os, const TrainingSet& set, const std::vector<std::string>& provenance = {}) {
    validate(set);
    require(set.dims() == kFeatureCount, "write_training_csv: expected 11 feature columns");
    for (const auto& p : provenance) os << "# " << p << '\n';
    for (auto name : kFeatureNames) os << name << ',';
    os << "label\n";
    for (std::size_t r = 0; r < set.size(); ++r) {
        for (std::size_t f = 0; f < kFeatureCount; ++f)
            os << format_double(set.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(f))) << ',';
        os << set.class_names[set.labels[r]] << '\n';
    }
}

/// Reads the format written by write_training_csv. Labels are resolved
/// against class_names (the catalog order by default).
inline TrainingSet read_training_csv(std::istream& is, std::vector<std::string> class_names = catalog_class_names()) {
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::vector<double> values;
    TrainingSet set;
    set.class_names = std::move(class_names);
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!header_seen && (line.empty() || line.front() == '#')) continue;
        const auto fields = detail::split_csv(line);
        if (!header_seen) {
            require(fields.size() == kFeatureCount + 1, "csv header: expected 12 columns");
            for (std::size_t f = 0; f < kFeatureCount; ++f)
                require(fields[f] == kFeatureNames[f], "csv header: unexpected column '" + std::string(fields[f]) + "'");
            require(fields.back() == "label", "csv header: last column must be 'label'");
            header_seen = true;
            continue;
        }
        if (line.empty()) continue;
        require(fields.size() == kFeatureCount + 1, "csv line " + std::to_string(line_no) + ": expected 12 fields");
        for (std::size_t f = 0; f < kFeatureCount; ++f) values.push_back(detail::parse_double(fields[f], line_no));
        std::size_t label = set.class_names.size();
        for (std::size_t c = 0; c < set.class_names.size(); ++c)
            if (set.class_names[c] == fields.back()) label = c;
        require(label < set.class_names.size(),
                "csv line " + std::to_string(line_no) + ": unknown class '" + std::string(fields.back()) + "'");
        set.labels.push_back(label);
    }
    require(header_seen, "csv: missing header");
    set.features = Eigen::Map<Matrix>(values.data(), static_cast<Eigen::Index>(set.labels.size()), kFeatureCount);
    return set;
}

}  // namespace meshranger
