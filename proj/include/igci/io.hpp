#pragma once

// File ingestion, manifests of cause-effect pairs, time-series lag alignment and
// machine-readable decision records.

#include "igci/core.hpp"
#include "igci/estimators.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace igci::io {

struct LoadedPair {
    SamplePair pair;
    /// Rows dropped because a chosen column held NaN or infinity.
    std::size_t dropped_rows = 0;
};

/// Reads whitespace- or comma-delimited numeric rows; '#' lines and blank lines are skipped.
/// Throws ParseError (with the line number) or TooFewRows.
[[nodiscard]] LoadedPair parse_pair(std::istream& in, std::size_t x_col, std::size_t y_col);
[[nodiscard]] LoadedPair load_pair(const std::filesystem::path& path, std::size_t x_col, std::size_t y_col);

/// Selected columns as an m x k matrix, rows with any non-finite selected value dropped.
[[nodiscard]] Eigen::MatrixXd load_columns(const std::filesystem::path& path, std::span<const std::size_t> columns);

/// Two columns, 17 significant digits, so reloading reproduces every value exactly.
void write_pair(std::ostream& out, const SamplePair& pair);

struct LagAlignment {
    /// Compare a[t] with b[t + lag].
    long lag = 0;
    double correlation = 0.0;
    std::size_t overlap_length = 0;
    bool low_correlation = false;
};

inline constexpr double kLowCorrelation = 0.5;

/// Exhaustive search over lags in [-max_lag, max_lag] for the largest Pearson correlation;
/// ties go to the smaller |lag|.
[[nodiscard]] LagAlignment align_lag(std::span<const double> a, std::span<const double> b, std::size_t max_lag);

/// The overlapping samples (a[t], b[t + lag]).
[[nodiscard]] SamplePair aligned_pair(std::span<const double> a, std::span<const double> b, long lag);

struct ManifestEntry {
    std::string id;
    std::filesystem::path data_path;
    std::size_t x_col = 0;
    std::size_t y_col = 1;
    std::optional<Direction> truth;
    double weight = 1.0;
};

struct PairsManifest {
    std::vector<ManifestEntry> entries;
};

/// CSV lines `id,path,x_col,y_col,truth,weight` (truth: x->y, y->x or unknown; weight optional).
/// Relative paths resolve against `base_dir`. A first line starting with `id,` is a header.
[[nodiscard]] PairsManifest parse_manifest(std::istream& in, const std::filesystem::path& base_dir);
/// Parses and validates: ids unique, data files exist, columns within the file width.
[[nodiscard]] PairsManifest load_manifest(const std::filesystem::path& path);
void write_manifest(std::ostream& out, const PairsManifest& manifest);

[[nodiscard]] std::optional<Direction> parse_truth(const std::string& text);

struct EntryResult {
    std::string id;
    std::optional<IgciReport> report;
    std::string error;
    std::optional<Direction> truth;
    double weight = 1.0;
};

struct ManifestSummary {
    std::vector<EntryResult> entries;
    /// Weighted share of entries that produced a decision.
    double decisions_pct = 0.0;
    /// Weighted share of correct decisions among decided entries with known truth.
    std::optional<double> accuracy_pct;
};

/// Scores every entry; per-entry failures are recorded rather than thrown.
/// Throws EmptyManifest.
[[nodiscard]] ManifestSummary evaluate_manifest(const PairsManifest& manifest, ReferenceFamily reference,
                                                EstimatorKind estimator);

enum class OutputFormat { Json, Tsv };

[[nodiscard]] std::string tsv_header();
/// One decision record: id, c_xy, c_yx, direction, estimator, reference, m_used.
[[nodiscard]] std::string format_record(const std::string& id, const IgciReport& report, OutputFormat format);

}  // namespace igci::io
