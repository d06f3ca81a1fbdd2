#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace procassess {

enum class ReportBlockKind {
    procedure_accuracy,    ///< Top-1 accuracy of procedure names
    coarse_segmentation,   ///< F1 per IoU, average coverage, average hit
    dense_caption,         ///< P/R/F1 per IoU plus caption scores
    missing_event,         ///< completeness P/R/F1 plus start-time hits
    order_error,           ///< start-time hits of misplaced segments
};

[[nodiscard]] std::string_view to_string(ReportBlockKind kind) noexcept;
[[nodiscard]] ReportBlockKind parse_report_block_kind(std::string_view name);

enum class ReportFormat { csv, markdown, structured };
[[nodiscard]] ReportFormat parse_report_format(std::string_view name);

struct ReportColumn {
    std::string name;
    int decimals = 3;
    double max_value = 1.0;  ///< values must lie in [0, max_value]
};

struct ReportRow {
    std::string model;
    std::vector<double> values;                ///< one per column
    std::map<std::string, double> details;     ///< raw counts, structured output only
};

struct ReportBlock {
    ReportBlockKind kind = ReportBlockKind::dense_caption;
    std::string title;
    std::vector<ReportColumn> columns;
    std::vector<ReportRow> rows;
};

struct FailureEntry {
    std::string task;
    std::string request_id;
    std::string reason;
};

struct MetricsReport {
    std::vector<ReportBlock> blocks;
    std::vector<FailureEntry> failures;
    std::map<std::string, std::string> meta;  ///< run parameters: seed, thresholds, ...
};

/// Column layouts. Defaults reproduce the familiar tables:
///   dense caption:  P@t R@t F1@t for each IoU t, then RougeL TokenF1
///   coarse:         F1@t per IoU t, Avg. Cov., Avg. Hit
///   missing event:  P R F1 Hit@<tol>s per tolerance
///   order error:    Hit@<tol>s per tolerance
[[nodiscard]] std::vector<ReportColumn> dense_caption_columns(std::span<const double> thresholds);
[[nodiscard]] std::vector<ReportColumn> coarse_segmentation_columns(std::span<const double> thresholds);
[[nodiscard]] std::vector<ReportColumn> procedure_accuracy_columns();
[[nodiscard]] std::vector<ReportColumn> missing_event_columns(std::span<const double> tolerances);
[[nodiscard]] std::vector<ReportColumn> order_error_columns(std::span<const double> tolerances);

/// "0.3" / "0.5" / "1.0": one decimal minimum, no trailing zeros beyond it.
[[nodiscard]] std::string format_level(double value);

/// Throws InvalidArgument on a row/column count mismatch or a value out of range.
void validate_report(const MetricsReport& report);

/// Sorts rows ascending by `column` in every block that has it (ties keep
/// model-name order). Throws InvalidArgument if no block has the column.
void sort_rows(MetricsReport& report, std::string_view column);

/// Appends blocks and failures of `other`; rows of blocks of the same kind and columns are merged.
void merge_reports(MetricsReport& into, const MetricsReport& other);

/// File name -> contents. csv: one "<block>.csv" per block plus "failures.csv";
/// markdown: "report.md"; structured: "report.json" (full precision).
[[nodiscard]] std::map<std::string, std::string> render_report(const MetricsReport& report,
                                                               ReportFormat format);

/// Validates and writes the rendered files into `output_dir`; returns their paths.
std::vector<std::filesystem::path> write_report(const MetricsReport& report, ReportFormat format,
                                                const std::filesystem::path& output_dir);

/// Inverse of the structured rendering.
[[nodiscard]] MetricsReport parse_structured_report(std::string_view text,
                                                    std::string_view source = "<memory>");

}  // namespace procassess
