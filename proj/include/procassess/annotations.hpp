#pragma once

#include "procassess/temporal.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace procassess {

inline constexpr std::string_view kAnnotationSchema = "procassess.annotations";
inline constexpr int kAnnotationSchemaVersion = 1;

/// Loads a versioned annotation file:
///
///   {"schema": "procassess.annotations", "schema_version": 1,
///    "videos": [{"video_id": ..., "procedure_label": ..., "duration": ...,
///                "segments": [{"start": s, "end": e, "caption": ...}, ...]}]}
///
/// Segments are returned sorted by start. Out-of-range intervals and empty
/// captions are rejected with an InputError naming the video and the
/// segment's position in the file.
[[nodiscard]] std::vector<AnnotationRecord> parse_annotations(const std::filesystem::path& path);

/// Same as parse_annotations but from an in-memory document; `source` labels errors.
[[nodiscard]] std::vector<AnnotationRecord> parse_annotations_text(std::string_view text,
                                                                   std::string_view source = "<memory>");

[[nodiscard]] std::string annotations_to_text(const std::vector<AnnotationRecord>& records);
void write_annotations(const std::filesystem::path& path, const std::vector<AnnotationRecord>& records);

}  // namespace procassess
