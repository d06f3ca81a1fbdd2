#pragma once

#include "procassess/temporal.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace procassess {

enum class PerturbationKind { mask, swap, shift, keep };

[[nodiscard]] std::string_view to_string(PerturbationKind kind) noexcept;
/// Throws InvalidArgument for unknown names.
[[nodiscard]] PerturbationKind parse_perturbation_kind(std::string_view name);

/// Caption shown in place of the hidden segment in masked samples.
inline constexpr std::string_view kMaskPlaceholder = "[MISSING]";

/// Output frame source: an index into the source frames, or nullopt for a blank frame.
using FrameRef = std::optional<std::int64_t>;

struct MaskTruth {
    std::size_t masked_index = 0;
    TimeInterval masked_interval{0.0, 1.0};
    std::string hidden_caption;
    /// All captions in order with kMaskPlaceholder at masked_index.
    std::vector<std::string> visible_captions;
};

struct OrderTruth {
    bool is_correct = true;
    /// Positions in the perturbed playback whose segment is out of place.
    std::vector<std::size_t> misplaced_indices;
    /// original[i] == perturbed[correct_order[i]].
    std::vector<std::size_t> correct_order;
    /// playback_order[k] is the original segment index shown k-th.
    std::vector<std::size_t> playback_order;
    /// Segments in playback order, re-timed on the perturbed timeline.
    std::vector<ActionSegment> perturbed_segments;
};

using GroundTruthLabel = std::variant<MaskTruth, OrderTruth>;

struct PerturbedSample {
    std::string sample_id;
    std::string source_video_id;
    PerturbationKind kind = PerturbationKind::keep;
    std::uint64_t seed = 0;
    double fps = 1.0;
    std::vector<FrameRef> frame_plan;
    GroundTruthLabel ground_truth;

    [[nodiscard]] std::int64_t frame_count() const noexcept {
        return static_cast<std::int64_t>(frame_plan.size());
    }
    /// nullptr when the sample is not of that family.
    [[nodiscard]] const MaskTruth* mask_truth() const noexcept {
        return std::get_if<MaskTruth>(&ground_truth);
    }
    [[nodiscard]] const OrderTruth* order_truth() const noexcept {
        return std::get_if<OrderTruth>(&ground_truth);
    }
};

/// Blanks the frames of one uniformly chosen segment. Needs >= 2 segments.
[[nodiscard]] PerturbedSample gen_mask(const AnnotationRecord& record, std::uint64_t seed,
                                       double fps = 1.0);

/// Exchanges the frame blocks of two segments; gap frames keep their order.
/// With no `indices`, two distinct segments are drawn from `seed`.
[[nodiscard]] PerturbedSample gen_swap(
    const AnnotationRecord& record, std::uint64_t seed,
    std::optional<std::pair<std::size_t, std::size_t>> indices = std::nullopt, double fps = 1.0);

/// Moves the first segment to the end: [s1, s2, ..., sn] -> [s2, ..., sn, s1].
[[nodiscard]] PerturbedSample gen_shift(const AnnotationRecord& record, double fps = 1.0);

/// Unmodified pass-through sample labelled correct.
[[nodiscard]] PerturbedSample gen_keep(const AnnotationRecord& record, double fps = 1.0);

/// The perturbed clip as an annotation record (segments re-timed, playback order).
[[nodiscard]] AnnotationRecord perturbed_record(const PerturbedSample& sample,
                                                const AnnotationRecord& source);

/// Plan equivalent to applying `inner` and then `outer` to the inner output.
[[nodiscard]] std::vector<FrameRef> compose_frame_plans(const std::vector<FrameRef>& inner,
                                                        const std::vector<FrameRef>& outer);

/// recovered[i] = items[order[i]]. Throws if `order` is not a permutation of items.
[[nodiscard]] std::vector<std::string> apply_order(const std::vector<std::string>& items,
                                                   const std::vector<std::size_t>& order);

[[nodiscard]] bool is_permutation_of_size(const std::vector<std::size_t>& order, std::size_t n);

/// Materializes `sample` from `input_dir` (exactly frame_count source frames)
/// into `output_dir`: referenced frames are copied byte for byte, blanks are
/// black images of the replaced frame's resolution.
void apply_frame_plan(const PerturbedSample& sample, const std::filesystem::path& input_dir,
                      const std::filesystem::path& output_dir);

}  // namespace procassess
