#pragma once

#include "procassess/perturb.hpp"
#include "procassess/responses.hpp"
#include "procassess/temporal.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace procassess {

enum class AttachmentPolicy { storyboard, none };

[[nodiscard]] std::string_view to_string(AttachmentPolicy policy) noexcept;
[[nodiscard]] AttachmentPolicy parse_attachment_policy(std::string_view name);

/// Texts use `{{slot}}` placeholders. Rendering fails unless every slot is given.
struct PromptTemplate {
    Task task = Task::dense_caption;
    std::string system;
    std::string user;
    AttachmentPolicy attachment = AttachmentPolicy::storyboard;

    /// Distinct slot names in order of first appearance (system text first).
    [[nodiscard]] std::vector<std::string> slots() const;
};

using SlotValues = std::map<std::string, std::string, std::less<>>;

/// Substitutes every `{{name}}`; throws InvalidArgument naming the first unfilled slot.
[[nodiscard]] std::string render_slots(std::string_view text, const SlotValues& values);

using PromptSet = std::map<Task, PromptTemplate>;

/// Shipped templates. They are meant to be edited: see load_prompt_set.
[[nodiscard]] PromptTemplate default_template(Task task);
[[nodiscard]] PromptSet default_prompt_set();

/// {"templates": {"<task>": {"system": ..., "user": ..., "attachment": "storyboard"|"none"}}}.
/// Tasks not listed keep their shipped template.
[[nodiscard]] PromptSet load_prompt_set(const std::filesystem::path& path);
[[nodiscard]] PromptSet parse_prompt_set(std::string_view text, std::string_view source = "<memory>");

/// Throws InvalidArgument for an unknown tag or a task without template.
[[nodiscard]] const PromptTemplate& template_for(const PromptSet& prompts, std::string_view task_tag);

struct RenderedRequest {
    std::string request_id;
    Task task = Task::dense_caption;
    std::string video_id;  ///< source video, or sample id for perturbed samples
    std::string system;
    std::string user;
    std::optional<std::filesystem::path> image;
};

/// Video-level tasks (procedure identification, dense captioning).
[[nodiscard]] RenderedRequest build_prompt(const PromptTemplate& tmpl, const AnnotationRecord& record,
                                           const std::optional<std::filesystem::path>& storyboard = {},
                                           double fps = 1.0);

/// Sample-level tasks. Missing-event prompts list the visible captions with the
/// placeholder at the masked slot; order prompts list the shuffled captions.
[[nodiscard]] RenderedRequest build_prompt(const PromptTemplate& tmpl, const PerturbedSample& sample,
                                           const std::optional<std::filesystem::path>& storyboard = {});

/// Ground truth written in the response form the parser reads best.
[[nodiscard]] std::string oracle_response(Task task, const AnnotationRecord& record);
[[nodiscard]] std::string oracle_response(Task task, const PerturbedSample& sample);

}  // namespace procassess
