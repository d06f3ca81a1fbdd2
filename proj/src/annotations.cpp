#include "procassess/annotations.hpp"

#include "io_util.hpp"
#include "procassess/errors.hpp"

#include "json.hpp"

#include <set>

namespace procassess {

using nlohmann::ordered_json;

std::vector<AnnotationRecord> parse_annotations_text(std::string_view text, std::string_view source) {
    const std::string where(source);
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const ordered_json::parse_error& e) {
        throw InputError(where + ": not valid JSON (" + e.what() + ")");
    }
    if (!doc.is_object() || doc.value("schema", "") != kAnnotationSchema) {
        throw InputError(where + ": expected schema \"" + std::string(kAnnotationSchema) + "\"");
    }
    if (!doc.contains("schema_version") || !doc["schema_version"].is_number_integer() ||
        doc["schema_version"].get<int>() != kAnnotationSchemaVersion) {
        throw InputError(where + ": unsupported annotation schema_version (expected " +
                         std::to_string(kAnnotationSchemaVersion) + ")");
    }
    if (!doc.contains("videos") || !doc["videos"].is_array()) {
        throw InputError(where + ": missing \"videos\" array");
    }

    std::vector<AnnotationRecord> records;
    std::set<std::string> ids;
    std::size_t position = 0;
    for (const auto& video : doc["videos"]) {
        const std::string locus_video = where + ": video #" + std::to_string(position++);
        if (!video.is_object()) throw InputError(locus_video + " is not an object");
        const std::string id = video.value("video_id", "");
        const std::string locus = where + ": video '" + (id.empty() ? "?" : id) + "'";
        if (!id.empty() && !ids.insert(id).second) throw InputError(locus + ": duplicate video_id");
        try {
            const auto duration = detail::require_number(video, "duration", locus);
            std::vector<ActionSegment> segments;
            if (!video.contains("segments") || !video["segments"].is_array()) {
                throw InputError(locus + ": missing \"segments\" array");
            }
            std::size_t index = 0;
            for (const auto& seg : video["segments"]) {
                const std::string seg_locus = locus + " segment " + std::to_string(index);
                try {
                    const double start = detail::require_number(seg, "start", seg_locus);
                    const double end = detail::require_number(seg, "end", seg_locus);
                    if (end > duration + kTimeEpsilon) {
                        throw InputError(seg_locus + ": end " + detail::format_number(end) +
                                         " exceeds duration " + detail::format_number(duration));
                    }
                    segments.emplace_back(TimeInterval(start, end),
                                          detail::require_string(seg, "caption", seg_locus));
                } catch (const InvalidArgument& e) {
                    throw InputError(seg_locus + ": " + e.what());
                }
                ++index;
            }
            records.emplace_back(id, video.value("procedure_label", ""), duration,
                                 std::move(segments));
        } catch (const InvalidArgument& e) {
            throw InputError(locus + ": " + e.what());
        }
    }
    return records;
}

std::vector<AnnotationRecord> parse_annotations(const std::filesystem::path& path) {
    return parse_annotations_text(detail::read_file(path), path.string());
}

std::string annotations_to_text(const std::vector<AnnotationRecord>& records) {
    ordered_json doc;
    doc["schema"] = kAnnotationSchema;
    doc["schema_version"] = kAnnotationSchemaVersion;
    auto& videos = doc["videos"] = ordered_json::array();
    for (const auto& r : records) {
        ordered_json v;
        v["video_id"] = r.video_id();
        v["procedure_label"] = r.procedure_label();
        v["duration"] = r.duration();
        auto& segs = v["segments"] = ordered_json::array();
        for (const auto& s : r.segments()) {
            segs.push_back({{"start", s.interval().start()},
                            {"end", s.interval().end()},
                            {"caption", s.caption()}});
        }
        videos.push_back(std::move(v));
    }
    return doc.dump(2) + "\n";
}

void write_annotations(const std::filesystem::path& path, const std::vector<AnnotationRecord>& records) {
    detail::write_file(path, annotations_to_text(records));
}

}  // namespace procassess
