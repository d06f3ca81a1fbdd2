#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace procassess {

/// Absolute tolerance for comparisons between times measured in seconds.
inline constexpr double kTimeEpsilon = 1e-9;

/// Half-open span [start, end) on a video timeline, in seconds.
///
/// Construction rejects negative starts, non-finite values and spans whose
/// length is not strictly positive (beyond kTimeEpsilon). Touching intervals
/// such as [0,5) and [5,10) share no time.
class TimeInterval {
public:
    TimeInterval(double start, double end);

    [[nodiscard]] double start() const noexcept { return start_; }
    [[nodiscard]] double end() const noexcept { return end_; }
    [[nodiscard]] double length() const noexcept { return end_ - start_; }
    [[nodiscard]] double midpoint() const noexcept { return 0.5 * (start_ + end_); }

    /// Same span translated by `offset` seconds. Throws if the result starts before 0.
    [[nodiscard]] TimeInterval shifted(double offset) const;

    friend bool operator==(const TimeInterval&, const TimeInterval&) = default;

private:
    double start_;
    double end_;
};

[[nodiscard]] double intersection_length(const TimeInterval& a, const TimeInterval& b) noexcept;

/// Temporal intersection over union, in [0, 1].
[[nodiscard]] double iou(const TimeInterval& a, const TimeInterval& b) noexcept;

/// Total length of the set covered by `intervals` (overlaps counted once).
[[nodiscard]] double union_length(std::span<const TimeInterval> intervals);

/// Fraction of the ground-truth union covered by the prediction union.
/// Returns 0 when `gt` is empty.
[[nodiscard]] double coverage_fraction(std::span<const TimeInterval> gt,
                                       std::span<const TimeInterval> pred);

/// Contiguous range of frame indices [first, last_exclusive).
class FrameIndexRange {
public:
    FrameIndexRange(std::int64_t first, std::int64_t last_exclusive);

    [[nodiscard]] std::int64_t first() const noexcept { return first_; }
    [[nodiscard]] std::int64_t last_exclusive() const noexcept { return last_exclusive_; }
    [[nodiscard]] std::int64_t size() const noexcept { return last_exclusive_ - first_; }
    [[nodiscard]] bool contains(std::int64_t frame) const noexcept {
        return frame >= first_ && frame < last_exclusive_;
    }

    friend bool operator==(const FrameIndexRange&, const FrameIndexRange&) = default;

private:
    std::int64_t first_;
    std::int64_t last_exclusive_;
};

/// Frame i covers [i/fps, (i+1)/fps). The returned range is never empty:
/// a sub-frame interval snaps to the frame containing its start.
[[nodiscard]] FrameIndexRange seconds_to_frames(const TimeInterval& interval, double fps = 1.0);

/// Number of frames sampled from a clip of `duration` seconds.
[[nodiscard]] std::int64_t frame_count_for_duration(double duration, double fps = 1.0);

/// One annotated (or predicted) step: a timeline span plus its caption.
class ActionSegment {
public:
    ActionSegment(TimeInterval interval, std::string caption);

    [[nodiscard]] const TimeInterval& interval() const noexcept { return interval_; }
    [[nodiscard]] const std::string& caption() const noexcept { return caption_; }

    friend bool operator==(const ActionSegment&, const ActionSegment&) = default;

private:
    TimeInterval interval_;
    std::string caption_;
};

/// Ground truth for one video. Segments are stored sorted by start time
/// (stable for equal starts) and must lie inside [0, duration].
class AnnotationRecord {
public:
    AnnotationRecord(std::string video_id, std::string procedure_label, double duration,
                     std::vector<ActionSegment> segments);

    [[nodiscard]] const std::string& video_id() const noexcept { return video_id_; }
    [[nodiscard]] const std::string& procedure_label() const noexcept { return procedure_label_; }
    [[nodiscard]] double duration() const noexcept { return duration_; }
    [[nodiscard]] const std::vector<ActionSegment>& segments() const noexcept { return segments_; }

    [[nodiscard]] std::vector<TimeInterval> intervals() const;
    [[nodiscard]] std::vector<std::string> captions() const;

    friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;

private:
    std::string video_id_;
    std::string procedure_label_;
    double duration_;
    std::vector<ActionSegment> segments_;
};

}  // namespace procassess
