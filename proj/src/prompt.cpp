#include "procassess/prompt.hpp"

#include "io_util.hpp"
#include "json.hpp"
#include "procassess/errors.hpp"

#include <algorithm>
#include <utility>

namespace procassess {

using json = nlohmann::ordered_json;

namespace {

constexpr std::string_view kPersona =
    "You function as a domain-expert nursing assessor. You review recordings of nursing students "
    "performing clinical skills and describe each procedural step precisely. The video is given as a "
    "temporal storyboard: frames sampled at {{fps}} FPS, concatenated left to right in chronological "
    "order, each stamped with its time as SS:mmm.";

constexpr std::string_view kSegmentFormat =
    "Answer with JSON only: {\"segments\": [{\"start\": <seconds>, \"end\": <seconds>, \"caption\": \"...\"}]}. "
    "Alternatively one line per step: <start> - <end>: <caption>.";

std::string numbered(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        out += std::to_string(i) + ". " + items[i] + "\n";
    }
    return out;
}

SlotValues common_slots(double fps, double duration, const std::string& video_id) {
    return {{"fps", detail::format_number(fps)},
            {"duration", detail::format_number(duration)},
            {"video_id", video_id},
            {"placeholder", std::string(kMaskPlaceholder)}};
}

json segments_json(const std::vector<ActionSegment>& segments) {
    json arr = json::array();
    for (const auto& s : segments) {
        arr.push_back({{"start", s.interval().start()}, {"end", s.interval().end()}, {"caption", s.caption()}});
    }
    return arr;
}

RenderedRequest finish(const PromptTemplate& tmpl, std::string item, std::string video_id,
                       const SlotValues& values, const std::optional<std::filesystem::path>& storyboard) {
    RenderedRequest req;
    req.request_id = make_request_id(tmpl.task, item);
    req.task = tmpl.task;
    req.video_id = std::move(video_id);
    req.system = render_slots(tmpl.system, values);
    req.user = render_slots(tmpl.user, values);
    if (tmpl.attachment == AttachmentPolicy::storyboard) req.image = storyboard;
    return req;
}

double sample_duration(const PerturbedSample& sample) {
    return static_cast<double>(sample.frame_count()) / sample.fps;
}

}  // namespace

std::string_view to_string(AttachmentPolicy policy) noexcept {
    return policy == AttachmentPolicy::storyboard ? "storyboard" : "none";
}

AttachmentPolicy parse_attachment_policy(std::string_view name) {
    if (name == "storyboard") return AttachmentPolicy::storyboard;
    if (name == "none") return AttachmentPolicy::none;
    throw InvalidArgument("unknown attachment policy '" + std::string(name) + "'");
}

std::vector<std::string> PromptTemplate::slots() const {
    std::vector<std::string> out;
    for (std::string_view text : {std::string_view(system), std::string_view(user)}) {
        std::size_t pos = 0;
        while ((pos = text.find("{{", pos)) != std::string_view::npos) {
            const auto close = text.find("}}", pos + 2);
            if (close == std::string_view::npos) break;
            std::string name(text.substr(pos + 2, close - pos - 2));
            if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(std::move(name));
            pos = close + 2;
        }
    }
    return out;
}

std::string render_slots(std::string_view text, const SlotValues& values) {
    std::string out;
    out.reserve(text.size());
    std::size_t pos = 0;
    while (true) {
        const auto open = text.find("{{", pos);
        if (open == std::string_view::npos) break;
        const auto close = text.find("}}", open + 2);
        if (close == std::string_view::npos) throw InvalidArgument("unterminated slot in prompt template");
        const auto name = text.substr(open + 2, close - open - 2);
        const auto it = values.find(name);
        if (it == values.end()) throw InvalidArgument("unfilled prompt slot '" + std::string(name) + "'");
        out.append(text.substr(pos, open - pos));
        out += it->second;
        pos = close + 2;
    }
    out.append(text.substr(pos));
    return out;
}

PromptTemplate default_template(Task task) {
    PromptTemplate t;
    t.task = task;
    t.system = std::string(kPersona);
    switch (task) {
        case Task::procedure_id:
            t.user = "The storyboard covers {{duration}} seconds of one nursing skill. Name the procedure "
                     "being performed and split the video into its major steps.\n"
                     "Answer with JSON only: {\"procedure\": \"<name>\", \"segments\": [{\"start\": <seconds>, "
                     "\"end\": <seconds>, \"caption\": \"...\"}]}.";
            break;
        case Task::dense_caption:
            t.user = "The storyboard covers {{duration}} seconds. List every action the student performs, "
                     "with its start and end time in seconds and a short caption.\n" +
                     std::string(kSegmentFormat);
            break;
        case Task::missing_event:
            t.user = "The storyboard covers {{duration}} seconds. The steps shown are listed below in order; "
                     "{{placeholder}} marks a step whose frames may have been blanked out.\n{{captions}}"
                     "Decide whether a step is missing. Answer with JSON only: {\"has_missing\": true|false, "
                     "\"start\": <seconds>, \"end\": <seconds>, \"caption\": \"<missing step>\"}.";
            break;
        case Task::order_correction:
            t.user = "The storyboard covers {{duration}} seconds. These {{segment_count}} steps are played in "
                     "the order below, numbered from 0:\n{{captions}}"
                     "Decide whether the order is procedurally correct. Answer with JSON only: "
                     "{\"is_correct\": true|false, \"misplaced\": [{\"index\": <i>, \"start\": <seconds>, "
                     "\"end\": <seconds>}], \"corrected_order\": [<indices of the listed steps in correct order>]}.";
            break;
    }
    return t;
}

PromptSet default_prompt_set() {
    PromptSet set;
    for (auto task : {Task::procedure_id, Task::dense_caption, Task::missing_event, Task::order_correction}) {
        set.emplace(task, default_template(task));
    }
    return set;
}

PromptSet parse_prompt_set(std::string_view text, std::string_view source) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw InputError(std::string(source) + ": invalid JSON: " + e.what());
    }
    if (!doc.is_object() || !doc.contains("templates") || !doc["templates"].is_object()) {
        throw InputError(std::string(source) + ": expected an object with \"templates\"");
    }
    auto set = default_prompt_set();
    for (const auto& [tag, body] : doc["templates"].items()) {
        const auto locus = std::string(source) + ": template '" + tag + "'";
        Task task;
        try {
            task = parse_task(tag);
        } catch (const InvalidArgument& e) {
            throw InputError(locus + ": " + e.what());
        }
        if (!body.is_object()) throw InputError(locus + ": expected an object");
        auto& t = set[task];
        t.task = task;
        if (body.contains("system")) t.system = detail::require_string(body, "system", locus);
        if (body.contains("user")) t.user = detail::require_string(body, "user", locus);
        if (body.contains("attachment")) {
            try {
                t.attachment = parse_attachment_policy(detail::require_string(body, "attachment", locus));
            } catch (const InvalidArgument& e) {
                throw InputError(locus + ": " + e.what());
            }
        }
        const bool per_sample = task == Task::missing_event || task == Task::order_correction;
        try {
            for (const auto& slot : t.slots()) {
                const bool known = slot == "fps" || slot == "duration" || slot == "video_id" || slot == "placeholder" ||
                                   (per_sample && (slot == "captions" || slot == "segment_count"));
                if (!known) throw InputError(locus + ": unknown slot {{" + slot + "}}");
            }
        } catch (const InvalidArgument& e) {
            throw InputError(locus + ": " + e.what());
        }
    }
    return set;
}

PromptSet load_prompt_set(const std::filesystem::path& path) {
    return parse_prompt_set(detail::read_file(path), path.string());
}

const PromptTemplate& template_for(const PromptSet& prompts, std::string_view task_tag) {
    const auto task = parse_task(task_tag);
    const auto it = prompts.find(task);
    if (it == prompts.end()) throw InvalidArgument("no prompt template for task '" + std::string(task_tag) + "'");
    return it->second;
}

RenderedRequest build_prompt(const PromptTemplate& tmpl, const AnnotationRecord& record,
                             const std::optional<std::filesystem::path>& storyboard, double fps) {
    if (tmpl.task != Task::procedure_id && tmpl.task != Task::dense_caption) {
        throw InvalidArgument("task '" + std::string(to_string(tmpl.task)) + "' needs a perturbed sample");
    }
    // Video-level prompts never reveal the annotation.
    const auto values = common_slots(fps, record.duration(), record.video_id());
    return finish(tmpl, record.video_id(), record.video_id(), values, storyboard);
}

RenderedRequest build_prompt(const PromptTemplate& tmpl, const PerturbedSample& sample,
                             const std::optional<std::filesystem::path>& storyboard) {
    auto values = common_slots(sample.fps, sample_duration(sample), sample.source_video_id);
    if (tmpl.task == Task::missing_event) {
        const auto* m = sample.mask_truth();
        std::vector<std::string> shown;
        if (m != nullptr) {
            shown = m->visible_captions;
        } else if (const auto* o = sample.order_truth()) {
            for (const auto& s : o->perturbed_segments) shown.push_back(s.caption());
        }
        values["captions"] = numbered(shown);
        values["segment_count"] = std::to_string(shown.size());
    } else if (tmpl.task == Task::order_correction) {
        const auto* o = sample.order_truth();
        if (o == nullptr) throw InvalidArgument("order prompt needs a reordered sample: '" + sample.sample_id + "'");
        std::vector<std::string> shown;
        for (const auto& s : o->perturbed_segments) shown.push_back(s.caption());
        values["captions"] = numbered(shown);
        values["segment_count"] = std::to_string(shown.size());
    } else {
        throw InvalidArgument("task '" + std::string(to_string(tmpl.task)) + "' is evaluated per video");
    }
    return finish(tmpl, sample.sample_id, sample.sample_id, values, storyboard);
}

std::string oracle_response(Task task, const AnnotationRecord& record) {
    json out;
    if (task == Task::procedure_id) {
        out["procedure"] = record.procedure_label();
    } else if (task != Task::dense_caption) {
        throw InvalidArgument("task '" + std::string(to_string(task)) + "' needs a perturbed sample");
    }
    out["segments"] = segments_json(record.segments());
    return out.dump();
}

std::string oracle_response(Task task, const PerturbedSample& sample) {
    json out;
    if (task == Task::missing_event) {
        if (const auto* m = sample.mask_truth()) {
            out = {{"has_missing", true},
                   {"start", m->masked_interval.start()},
                   {"end", m->masked_interval.end()},
                   {"caption", m->hidden_caption}};
        } else {
            out = {{"has_missing", false}};
        }
    } else if (task == Task::order_correction) {
        const auto* o = sample.order_truth();
        if (o == nullptr) throw InvalidArgument("order answer needs a reordered sample: '" + sample.sample_id + "'");
        json misplaced = json::array();
        for (auto k : o->misplaced_indices) {
            const auto& iv = o->perturbed_segments[k].interval();
            misplaced.push_back({{"index", k}, {"start", iv.start()}, {"end", iv.end()}});
        }
        out = {{"is_correct", o->is_correct}, {"misplaced", misplaced}, {"corrected_order", o->correct_order}};
    } else {
        throw InvalidArgument("task '" + std::string(to_string(task)) + "' is evaluated per video");
    }
    return out.dump();
}

}  // namespace procassess
