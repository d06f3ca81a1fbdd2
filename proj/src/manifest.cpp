#include "procassess/manifest.hpp"

#include "io_util.hpp"
#include "procassess/errors.hpp"

#include "json.hpp"

#include <sstream>

namespace procassess {

using nlohmann::ordered_json;

namespace {

ordered_json interval_json(const TimeInterval& iv) {
    return ordered_json::array({iv.start(), iv.end()});
}

TimeInterval interval_from(const ordered_json& j, const std::string& locus) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw InputError(locus + ": interval must be [start, end]");
    }
    try {
        return TimeInterval(j[0].get<double>(), j[1].get<double>());
    } catch (const InvalidArgument& e) {
        throw InputError(locus + ": " + e.what());
    }
}

ordered_json sample_json(const PerturbedSample& s) {
    ordered_json j;
    j["schema_version"] = kManifestSchemaVersion;
    j["sample_id"] = s.sample_id;
    j["video_id"] = s.source_video_id;
    j["kind"] = to_string(s.kind);
    j["seed"] = s.seed;
    j["fps"] = s.fps;
    auto& plan = j["frame_plan"] = ordered_json::array();
    for (const auto& ref : s.frame_plan) {
        if (ref) plan.push_back(*ref); else plan.push_back(nullptr);
    }
    ordered_json gt;
    if (const auto* m = s.mask_truth()) {
        gt["masked_index"] = m->masked_index;
        gt["masked_interval"] = interval_json(m->masked_interval);
        gt["hidden_caption"] = m->hidden_caption;
        gt["visible_captions"] = m->visible_captions;
        gt["placeholder"] = kMaskPlaceholder;
    } else if (const auto* o = s.order_truth()) {
        gt["is_correct"] = o->is_correct;
        gt["misplaced_indices"] = o->misplaced_indices;
        gt["correct_order"] = o->correct_order;
        gt["playback_order"] = o->playback_order;
        auto& segs = gt["perturbed_segments"] = ordered_json::array();
        for (const auto& seg : o->perturbed_segments) {
            segs.push_back({{"start", seg.interval().start()},
                            {"end", seg.interval().end()},
                            {"caption", seg.caption()}});
        }
    }
    j["ground_truth"] = std::move(gt);
    return j;
}

std::vector<std::size_t> index_list(const ordered_json& j, const char* key, const std::string& locus) {
    if (!j.contains(key) || !j[key].is_array()) throw InputError(locus + ": \"" + key + "\" must be a list");
    std::vector<std::size_t> out;
    for (const auto& v : j[key]) {
        if (!v.is_number_unsigned()) throw InputError(locus + ": \"" + key + "\" holds a non-index");
        out.push_back(v.get<std::size_t>());
    }
    return out;
}

PerturbedSample sample_from(const ordered_json& j, const std::string& locus) {
    if (!j.is_object()) throw InputError(locus + ": sample is not an object");
    if (!j.contains("schema_version") || j["schema_version"] != kManifestSchemaVersion) {
        throw InputError(locus + ": unsupported sample schema_version");
    }
    PerturbedSample s;
    s.sample_id = detail::require_string(j, "sample_id", locus);
    s.source_video_id = detail::require_string(j, "video_id", locus);
    try {
        s.kind = parse_perturbation_kind(detail::require_string(j, "kind", locus));
    } catch (const InvalidArgument& e) {
        throw InputError(locus + ": " + e.what());
    }
    if (!j.contains("seed") || !j["seed"].is_number_unsigned()) {
        throw InputError(locus + ": \"seed\" must be an unsigned integer");
    }
    s.seed = j["seed"].get<std::uint64_t>();
    s.fps = detail::require_number(j, "fps", locus);
    if (!j.contains("frame_plan") || !j["frame_plan"].is_array()) {
        throw InputError(locus + ": missing frame_plan");
    }
    for (const auto& ref : j["frame_plan"]) {
        if (ref.is_null()) s.frame_plan.emplace_back(std::nullopt);
        else if (ref.is_number_integer() && ref.get<std::int64_t>() >= 0) s.frame_plan.emplace_back(ref.get<std::int64_t>());
        else throw InputError(locus + ": frame_plan entries must be indices or null");
    }
    if (!j.contains("ground_truth") || !j["ground_truth"].is_object()) {
        throw InputError(locus + ": missing ground_truth");
    }
    const auto& gt = j["ground_truth"];
    const std::string gt_locus = locus + " ground_truth";
    if (s.kind == PerturbationKind::mask) {
        MaskTruth m;
        if (!gt.contains("masked_index") || !gt["masked_index"].is_number_unsigned()) {
            throw InputError(gt_locus + ": missing masked_index");
        }
        m.masked_index = gt["masked_index"].get<std::size_t>();
        m.masked_interval = interval_from(gt.value("masked_interval", ordered_json()), gt_locus);
        m.hidden_caption = detail::require_string(gt, "hidden_caption", gt_locus);
        if (!gt.contains("visible_captions") || !gt["visible_captions"].is_array()) {
            throw InputError(gt_locus + ": missing visible_captions");
        }
        for (const auto& c : gt["visible_captions"]) {
            if (!c.is_string()) throw InputError(gt_locus + ": captions must be strings");
            m.visible_captions.push_back(c.get<std::string>());
        }
        if (m.masked_index >= m.visible_captions.size()) {
            throw InputError(gt_locus + ": masked_index out of range");
        }
        s.ground_truth = std::move(m);
    } else {
        OrderTruth o;
        if (!gt.contains("is_correct") || !gt["is_correct"].is_boolean()) {
            throw InputError(gt_locus + ": missing is_correct");
        }
        o.is_correct = gt["is_correct"].get<bool>();
        o.misplaced_indices = index_list(gt, "misplaced_indices", gt_locus);
        o.correct_order = index_list(gt, "correct_order", gt_locus);
        o.playback_order = index_list(gt, "playback_order", gt_locus);
        if (!gt.contains("perturbed_segments") || !gt["perturbed_segments"].is_array()) {
            throw InputError(gt_locus + ": missing perturbed_segments");
        }
        std::size_t k = 0;
        for (const auto& seg : gt["perturbed_segments"]) {
            const std::string seg_locus = gt_locus + " segment " + std::to_string(k++);
            try {
                o.perturbed_segments.emplace_back(
                    TimeInterval(detail::require_number(seg, "start", seg_locus),
                                 detail::require_number(seg, "end", seg_locus)),
                    detail::require_string(seg, "caption", seg_locus));
            } catch (const InvalidArgument& e) {
                throw InputError(seg_locus + ": " + e.what());
            }
        }
        const auto n = o.perturbed_segments.size();
        if (!is_permutation_of_size(o.correct_order, n) || !is_permutation_of_size(o.playback_order, n)) {
            throw InputError(gt_locus + ": correct_order/playback_order are not permutations of " +
                             std::to_string(n) + " segments");
        }
        s.ground_truth = std::move(o);
    }
    return s;
}

}  // namespace

std::string sample_to_json_line(const PerturbedSample& sample) { return sample_json(sample).dump(); }

std::string manifest_to_text(const DatasetManifest& manifest) {
    ordered_json header;
    header["schema"] = kManifestSchema;
    header["header"] = {{"schema_version", manifest.header.schema_version},
                        {"rng", manifest.header.rng},
                        {"root_seed", manifest.header.root_seed},
                        {"fps", manifest.header.fps},
                        {"annotations", manifest.header.annotations},
                        {"samples", manifest.samples.size()}};
    std::string out = header.dump() + "\n";
    for (const auto& s : manifest.samples) out += sample_to_json_line(s) + "\n";
    return out;
}

DatasetManifest parse_manifest_text(std::string_view text, std::string_view source) {
    const std::string where(source);
    DatasetManifest manifest;
    std::istringstream lines{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(lines, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string locus = where + ":" + std::to_string(line_no);
        ordered_json j;
        try {
            j = ordered_json::parse(line);
        } catch (const ordered_json::parse_error&) {
            throw InputError(locus + ": not valid JSON");
        }
        if (!have_header) {
            if (!j.is_object() || j.value("schema", "") != kManifestSchema || !j.contains("header")) {
                throw InputError(locus + ": expected a \"" + std::string(kManifestSchema) + "\" header line");
            }
            const auto& h = j["header"];
            if (!h.contains("schema_version") || h["schema_version"] != kManifestSchemaVersion) {
                throw InputError(locus + ": unsupported manifest schema_version");
            }
            manifest.header.rng = h.value("rng", "");
            manifest.header.root_seed = h.value("root_seed", std::uint64_t{0});
            manifest.header.fps = h.value("fps", 1.0);
            manifest.header.annotations = h.value("annotations", "");
            have_header = true;
            continue;
        }
        manifest.samples.push_back(sample_from(j, locus));
    }
    if (!have_header) throw InputError(where + ": empty manifest");
    return manifest;
}

void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
    detail::write_file(path, manifest_to_text(manifest));
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
    return parse_manifest_text(detail::read_file(path), path.string());
}

}  // namespace procassess
