#include "procassess/perturb.hpp"

#include "procassess/errors.hpp"
#include "procassess/image.hpp"
#include "procassess/media.hpp"
#include "procassess/rng.hpp"

#include <algorithm>
#include <numeric>

namespace procassess {

namespace fs = std::filesystem;

namespace {

std::vector<FrameRef> identity_plan(std::int64_t frames) {
    std::vector<FrameRef> plan;
    plan.reserve(static_cast<std::size_t>(frames));
    for (std::int64_t i = 0; i < frames; ++i) plan.emplace_back(i);
    return plan;
}

std::vector<std::size_t> identity_order(std::size_t n) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    return order;
}

std::vector<std::size_t> inverse(const std::vector<std::size_t>& perm) {
    std::vector<std::size_t> inv(perm.size());
    for (std::size_t k = 0; k < perm.size(); ++k) inv[perm[k]] = k;
    return inv;
}

void require_segments(const AnnotationRecord& record, std::size_t minimum, std::string_view what) {
    if (record.segments().size() < minimum) {
        throw InvalidArgument("video '" + record.video_id() + "': " + std::string(what) +
                              " needs at least " + std::to_string(minimum) + " segments, found " +
                              std::to_string(record.segments().size()));
    }
}

// Disjoint frame blocks per segment, in segment order. A block that would
// overlap its predecessor starts where the predecessor ends.
std::vector<FrameIndexRange> segment_blocks(const AnnotationRecord& record, double fps,
                                            std::int64_t frame_count) {
    std::vector<FrameIndexRange> blocks;
    for (const auto& seg : record.segments()) {
        auto block = seconds_to_frames(seg.interval(), fps);
        if (!blocks.empty() && block.first() < blocks.back().last_exclusive()) {
            const auto first = blocks.back().last_exclusive();
            block = FrameIndexRange(first, std::max(block.last_exclusive(), first + 1));
        }
        if (block.last_exclusive() > frame_count) {
            throw InvalidArgument("video '" + record.video_id() +
                                  "': segments are too dense to reorder at this frame rate");
        }
        blocks.push_back(block);
    }
    return blocks;
}

PerturbedSample base_sample(const AnnotationRecord& record, PerturbationKind kind,
                            std::uint64_t seed, double fps) {
    PerturbedSample s;
    s.sample_id = record.video_id() + "__" + std::string(to_string(kind));
    s.source_video_id = record.video_id();
    s.kind = kind;
    s.seed = seed;
    s.fps = fps;
    return s;
}

PerturbedSample reorder(const AnnotationRecord& record, PerturbationKind kind, std::uint64_t seed,
                        std::vector<std::size_t> playback, double fps) {
    const std::int64_t frames = frame_count_for_duration(record.duration(), fps);
    const auto blocks = segment_blocks(record, fps, frames);
    const auto& segs = record.segments();

    PerturbedSample sample = base_sample(record, kind, seed, fps);
    OrderTruth truth;
    std::int64_t previous_end = 0;
    for (std::size_t slot = 0; slot < playback.size(); ++slot) {
        for (std::int64_t f = previous_end; f < blocks[slot].first(); ++f) {
            sample.frame_plan.emplace_back(f);
        }
        const std::size_t seg = playback[slot];
        const auto new_first = static_cast<std::int64_t>(sample.frame_plan.size());
        for (std::int64_t f = blocks[seg].first(); f < blocks[seg].last_exclusive(); ++f) {
            sample.frame_plan.emplace_back(f);
        }
        const auto new_last = static_cast<std::int64_t>(sample.frame_plan.size());
        const double delta = static_cast<double>(new_first - blocks[seg].first()) / fps;
        const auto& iv = segs[seg].interval();
        // Clip to the placed block so the new timeline maps back onto exactly these
        // frames; cascaded blocks start later than their interval does.
        const double start = std::max(iv.start() + delta, static_cast<double>(new_first) / fps);
        double end = iv.end() + delta;
        if (end * fps <= static_cast<double>(new_last - 1) + kTimeEpsilon) end = static_cast<double>(new_last) / fps;
        truth.perturbed_segments.emplace_back(TimeInterval(start, end), segs[seg].caption());
        previous_end = blocks[slot].last_exclusive();
    }
    for (std::int64_t f = previous_end; f < frames; ++f) sample.frame_plan.emplace_back(f);

    for (std::size_t k = 0; k < playback.size(); ++k) {
        if (playback[k] != k) truth.misplaced_indices.push_back(k);
    }
    truth.is_correct = truth.misplaced_indices.empty();
    truth.correct_order = inverse(playback);
    truth.playback_order = std::move(playback);
    sample.ground_truth = std::move(truth);
    return sample;
}

}  // namespace

std::string_view to_string(PerturbationKind kind) noexcept {
    switch (kind) {
        case PerturbationKind::mask: return "mask";
        case PerturbationKind::swap: return "swap";
        case PerturbationKind::shift: return "shift";
        case PerturbationKind::keep: return "keep";
    }
    return "keep";
}

PerturbationKind parse_perturbation_kind(std::string_view name) {
    if (name == "mask") return PerturbationKind::mask;
    if (name == "swap") return PerturbationKind::swap;
    if (name == "shift") return PerturbationKind::shift;
    if (name == "keep") return PerturbationKind::keep;
    throw InvalidArgument("unknown perturbation kind '" + std::string(name) + "'");
}

PerturbedSample gen_mask(const AnnotationRecord& record, std::uint64_t seed, double fps) {
    require_segments(record, 2, "masking");
    const auto& segs = record.segments();
    SplitMix64 rng(seed);
    const auto index = static_cast<std::size_t>(rng.uniform(segs.size()));

    PerturbedSample sample = base_sample(record, PerturbationKind::mask, seed, fps);
    const std::int64_t frames = frame_count_for_duration(record.duration(), fps);
    sample.frame_plan = identity_plan(frames);
    const auto blanked = seconds_to_frames(segs[index].interval(), fps);
    for (std::int64_t f = blanked.first(); f < std::min(blanked.last_exclusive(), frames); ++f) {
        sample.frame_plan[static_cast<std::size_t>(f)] = std::nullopt;
    }

    MaskTruth truth;
    truth.masked_index = index;
    truth.masked_interval = segs[index].interval();
    truth.hidden_caption = segs[index].caption();
    truth.visible_captions = record.captions();
    truth.visible_captions[index] = std::string(kMaskPlaceholder);
    sample.ground_truth = std::move(truth);
    return sample;
}

PerturbedSample gen_swap(const AnnotationRecord& record, std::uint64_t seed,
                         std::optional<std::pair<std::size_t, std::size_t>> indices, double fps) {
    require_segments(record, 2, "swapping");
    const std::size_t n = record.segments().size();
    std::size_t i = 0, j = 0;
    if (indices) {
        std::tie(i, j) = *indices;
        if (i == j || i >= n || j >= n) {
            throw InvalidArgument("video '" + record.video_id() + "': swap indices (" +
                                  std::to_string(i) + ", " + std::to_string(j) +
                                  ") must be distinct and below " + std::to_string(n));
        }
    } else {
        SplitMix64 rng(seed);
        i = static_cast<std::size_t>(rng.uniform(n));
        j = static_cast<std::size_t>(rng.uniform(n - 1));
        if (j >= i) ++j;
    }
    auto playback = identity_order(n);
    std::swap(playback[i], playback[j]);
    return reorder(record, PerturbationKind::swap, seed, std::move(playback), fps);
}

PerturbedSample gen_shift(const AnnotationRecord& record, double fps) {
    require_segments(record, 2, "shifting");
    auto playback = identity_order(record.segments().size());
    std::rotate(playback.begin(), playback.begin() + 1, playback.end());
    return reorder(record, PerturbationKind::shift, 0, std::move(playback), fps);
}

PerturbedSample gen_keep(const AnnotationRecord& record, double fps) {
    require_segments(record, 1, "a pass-through sample");
    PerturbedSample sample = base_sample(record, PerturbationKind::keep, 0, fps);
    sample.frame_plan = identity_plan(frame_count_for_duration(record.duration(), fps));
    OrderTruth truth;
    truth.is_correct = true;
    truth.correct_order = identity_order(record.segments().size());
    truth.playback_order = truth.correct_order;
    truth.perturbed_segments = record.segments();
    sample.ground_truth = std::move(truth);
    return sample;
}

AnnotationRecord perturbed_record(const PerturbedSample& sample, const AnnotationRecord& source) {
    const auto* truth = sample.order_truth();
    if (truth == nullptr) {
        throw InvalidArgument("sample '" + sample.sample_id + "' does not reorder segments");
    }
    double duration = source.duration();
    for (const auto& seg : truth->perturbed_segments) {
        duration = std::max(duration, seg.interval().end());
    }
    return AnnotationRecord(source.video_id(), source.procedure_label(), duration,
                            truth->perturbed_segments);
}

std::vector<FrameRef> compose_frame_plans(const std::vector<FrameRef>& inner,
                                          const std::vector<FrameRef>& outer) {
    std::vector<FrameRef> out;
    out.reserve(outer.size());
    for (const auto& ref : outer) {
        if (!ref) {
            out.emplace_back(std::nullopt);
            continue;
        }
        if (*ref < 0 || *ref >= static_cast<std::int64_t>(inner.size())) {
            throw InvalidArgument("frame plan refers to frame " + std::to_string(*ref) +
                                  " beyond the inner plan");
        }
        out.push_back(inner[static_cast<std::size_t>(*ref)]);
    }
    return out;
}

bool is_permutation_of_size(const std::vector<std::size_t>& order, std::size_t n) {
    if (order.size() != n) return false;
    std::vector<bool> seen(n, false);
    for (auto v : order) {
        if (v >= n || seen[v]) return false;
        seen[v] = true;
    }
    return true;
}

std::vector<std::string> apply_order(const std::vector<std::string>& items,
                                     const std::vector<std::size_t>& order) {
    if (!is_permutation_of_size(order, items.size())) {
        throw InvalidArgument("order is not a permutation of " + std::to_string(items.size()) +
                              " items");
    }
    std::vector<std::string> out;
    out.reserve(items.size());
    for (auto k : order) out.push_back(items[k]);
    return out;
}

void apply_frame_plan(const PerturbedSample& sample, const fs::path& input_dir,
                      const fs::path& output_dir) {
    const auto files = list_frame_files(input_dir);
    if (static_cast<std::int64_t>(files.size()) != sample.frame_count()) {
        throw InputError("sample '" + sample.sample_id + "' expects " +
                         std::to_string(sample.frame_count()) + " frames but " +
                         input_dir.string() + " has " + std::to_string(files.size()));
    }
    std::error_code ec;
    fs::create_directories(output_dir, ec);
    if (ec) throw InputError("cannot create " + output_dir.string() + ": " + ec.message());

    for (std::size_t k = 0; k < sample.frame_plan.size(); ++k) {
        const auto target = output_dir / frame_file_name(static_cast<std::int64_t>(k));
        const auto& ref = sample.frame_plan[k];
        if (ref) {
            if (*ref < 0 || *ref >= static_cast<std::int64_t>(files.size())) {
                throw InputError("sample '" + sample.sample_id + "' refers to missing frame " +
                                 std::to_string(*ref));
            }
            fs::copy_file(files[static_cast<std::size_t>(*ref)], target,
                          fs::copy_options::overwrite_existing, ec);
            if (ec) throw InputError("cannot write " + target.string() + ": " + ec.message());
        } else {
            const auto [w, h] = read_png_size(files[k]);
            write_png(target, Raster(w, h));
        }
    }
}

}  // namespace procassess
