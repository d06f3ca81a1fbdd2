#pragma once

#include "procassess/temporal.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace procassess {

enum class Task { procedure_id, dense_caption, missing_event, order_correction };

[[nodiscard]] std::string_view to_string(Task task) noexcept;
/// Throws InvalidArgument for unknown tags.
[[nodiscard]] Task parse_task(std::string_view tag);

/// Request ids are "<task>/<item>", item being a video id or a sample id.
[[nodiscard]] std::string make_request_id(Task task, std::string_view item);

/// One model answer as stored in the raw dump.
struct RawModelResponse {
    std::string request_id;
    Task task = Task::dense_caption;
    std::string video_id;
    std::string text;
    bool ok = true;          ///< false: the request failed permanently
    std::string error;
    int attempts = 1;
    int http_status = 0;
};

/// Seconds from "12", "12.5", "12.5s", "MM:SS(.f)", "H:MM:SS(.f)" or the
/// overlay form "SS:mmm". Decimal commas are rejected.
[[nodiscard]] std::optional<double> parse_time(std::string_view text);

struct SegmentParse {
    std::vector<ActionSegment> segments;
    std::size_t malformed_lines = 0;
    bool structured = false;  ///< segments came from an embedded JSON object

    /// No usable segment: scored as a total miss.
    [[nodiscard]] bool failed() const noexcept { return segments.empty(); }
};

/// Structured-first segment extraction. Looks for a JSON array of segments
/// (bare or under "segments"/"actions"/"events"); otherwise falls back to
/// lines shaped "<start> <sep> <end>: <caption>" with sep a hyphen, en or em dash,
/// tilde or "to". Never throws; every rejected line increments malformed_lines.
[[nodiscard]] SegmentParse parse_segment_list(std::string_view text) noexcept;
/// Throws InvalidArgument when the response is not a segment-producing task.
[[nodiscard]] SegmentParse parse_segment_list(const RawModelResponse& response);

/// Procedure name from {"procedure": ...} or a "Procedure: ..." line.
[[nodiscard]] std::optional<std::string> parse_procedure_label(std::string_view text) noexcept;

struct OrderVerdict {
    bool is_correct = false;
    std::vector<std::size_t> misplaced;
    /// Start/end the model gave for misplaced segments, when it gave times.
    std::vector<TimeInterval> misplaced_intervals;
    std::optional<std::vector<std::size_t>> corrected_order;
    std::string reasoning;
};

/// `verdict` empty means the response was not interpretable (an abstention).
struct OrderParse {
    std::optional<OrderVerdict> verdict;
    std::string note;
    [[nodiscard]] bool abstained() const noexcept { return !verdict.has_value(); }
};

/// `segment_count` is the number of segments shown to the model; a corrected
/// order that is not a permutation of it is dropped with a note.
[[nodiscard]] OrderParse parse_order_verdict(std::string_view text, std::size_t segment_count) noexcept;
[[nodiscard]] OrderParse parse_order_verdict(const RawModelResponse& response, std::size_t segment_count);

struct MissingVerdict {
    bool has_missing = false;
    std::optional<TimeInterval> predicted_interval;
    std::optional<std::string> predicted_caption;
    std::string reasoning;
};

struct MissingParse {
    std::optional<MissingVerdict> verdict;
    std::string note;
    [[nodiscard]] bool abstained() const noexcept { return !verdict.has_value(); }
};

/// A verdict claiming a missing step without naming it is an abstention.
[[nodiscard]] MissingParse parse_missing_verdict(std::string_view text) noexcept;
[[nodiscard]] MissingParse parse_missing_verdict(const RawModelResponse& response);

inline constexpr std::string_view kDumpSchema = "procassess.dump";
inline constexpr int kDumpSchemaVersion = 1;

[[nodiscard]] std::string response_to_json_line(const RawModelResponse& response);
/// Reads a JSON Lines dump. Throws InputError if the file is missing and
/// ParseError if any line is not a valid dump record.
[[nodiscard]] std::vector<RawModelResponse> read_dump(const std::filesystem::path& path);
[[nodiscard]] std::vector<RawModelResponse> parse_dump_text(std::string_view text,
                                                            std::string_view source = "<memory>");

}  // namespace procassess
