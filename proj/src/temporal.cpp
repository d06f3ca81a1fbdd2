#include "procassess/temporal.hpp"

#include "procassess/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace procassess {

namespace {

std::string describe(double start, double end) {
    std::ostringstream out;
    out << "[" << start << ", " << end << ")";
    return out.str();
}

// Sorted, disjoint cover of `intervals` as (start, end) pairs.
std::vector<std::pair<double, double>> merged(std::span<const TimeInterval> intervals) {
    std::vector<std::pair<double, double>> spans;
    spans.reserve(intervals.size());
    for (const auto& iv : intervals) spans.emplace_back(iv.start(), iv.end());
    std::sort(spans.begin(), spans.end());
    std::vector<std::pair<double, double>> out;
    for (const auto& s : spans) {
        if (!out.empty() && s.first <= out.back().second) {
            out.back().second = std::max(out.back().second, s.second);
        } else {
            out.push_back(s);
        }
    }
    return out;
}

double merged_length(const std::vector<std::pair<double, double>>& spans) {
    double total = 0.0;
    for (const auto& [s, e] : spans) total += e - s;
    return total;
}

}  // namespace

TimeInterval::TimeInterval(double start, double end) : start_(start), end_(end) {
    if (!std::isfinite(start) || !std::isfinite(end)) {
        throw InvalidArgument("time interval has non-finite bounds");
    }
    if (start < 0.0) {
        throw InvalidArgument("time interval " + describe(start, end) + " starts before 0");
    }
    if (!(end - start > kTimeEpsilon)) {
        throw InvalidArgument("time interval " + describe(start, end) + " has no positive length");
    }
}

TimeInterval TimeInterval::shifted(double offset) const {
    return TimeInterval(start_ + offset, end_ + offset);
}

double intersection_length(const TimeInterval& a, const TimeInterval& b) noexcept {
    return std::max(0.0, std::min(a.end(), b.end()) - std::max(a.start(), b.start()));
}

double iou(const TimeInterval& a, const TimeInterval& b) noexcept {
    const double inter = intersection_length(a, b);
    const double uni = a.length() + b.length() - inter;
    return std::clamp(inter / uni, 0.0, 1.0);
}

double union_length(std::span<const TimeInterval> intervals) {
    return merged_length(merged(intervals));
}

double coverage_fraction(std::span<const TimeInterval> gt, std::span<const TimeInterval> pred) {
    const auto g = merged(gt);
    const double total = merged_length(g);
    if (g.empty() || total <= 0.0) return 0.0;
    const auto p = merged(pred);

    double covered = 0.0;
    std::size_t i = 0, j = 0;
    while (i < g.size() && j < p.size()) {
        const double lo = std::max(g[i].first, p[j].first);
        const double hi = std::min(g[i].second, p[j].second);
        if (hi > lo) covered += hi - lo;
        if (g[i].second < p[j].second) ++i; else ++j;
    }
    return std::clamp(covered / total, 0.0, 1.0);
}

FrameIndexRange::FrameIndexRange(std::int64_t first, std::int64_t last_exclusive)
    : first_(first), last_exclusive_(last_exclusive) {
    if (first < 0 || last_exclusive <= first) {
        throw InvalidArgument("frame range [" + std::to_string(first) + ", " +
                              std::to_string(last_exclusive) + ") is empty or negative");
    }
}

FrameIndexRange seconds_to_frames(const TimeInterval& interval, double fps) {
    if (!(fps > 0.0) || !std::isfinite(fps)) throw InvalidArgument("fps must be positive");
    const auto first = static_cast<std::int64_t>(std::floor(interval.start() * fps + kTimeEpsilon));
    auto last = static_cast<std::int64_t>(std::ceil(interval.end() * fps - kTimeEpsilon));
    last = std::max(last, first + 1);
    return {first, last};
}

std::int64_t frame_count_for_duration(double duration, double fps) {
    if (!(fps > 0.0) || !std::isfinite(fps)) throw InvalidArgument("fps must be positive");
    if (!(duration > 0.0)) return 0;
    return static_cast<std::int64_t>(std::ceil(duration * fps - kTimeEpsilon));
}

ActionSegment::ActionSegment(TimeInterval interval, std::string caption)
    : interval_(interval), caption_(std::move(caption)) {
    const auto first = caption_.find_first_not_of(" \t\r\n\f\v");
    if (first == std::string::npos) throw InvalidArgument("action segment caption is empty");
    const auto last = caption_.find_last_not_of(" \t\r\n\f\v");
    caption_ = caption_.substr(first, last - first + 1);
}

AnnotationRecord::AnnotationRecord(std::string video_id, std::string procedure_label,
                                   double duration, std::vector<ActionSegment> segments)
    : video_id_(std::move(video_id)),
      procedure_label_(std::move(procedure_label)),
      duration_(duration),
      segments_(std::move(segments)) {
    if (video_id_.empty()) throw InvalidArgument("annotation record has an empty video_id");
    if (!std::isfinite(duration_) || !(duration_ > 0.0)) {
        throw InvalidArgument("video '" + video_id_ + "': duration must be positive");
    }
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        if (segments_[i].interval().end() > duration_ + kTimeEpsilon) {
            std::ostringstream msg;
            msg << "video '" << video_id_ << "' segment " << i << ": end "
                << segments_[i].interval().end() << " exceeds duration " << duration_;
            throw InvalidArgument(msg.str());
        }
    }
    std::stable_sort(segments_.begin(), segments_.end(), [](const auto& a, const auto& b) {
        return a.interval().start() < b.interval().start();
    });
}

std::vector<TimeInterval> AnnotationRecord::intervals() const {
    std::vector<TimeInterval> out;
    out.reserve(segments_.size());
    for (const auto& s : segments_) out.push_back(s.interval());
    return out;
}

std::vector<std::string> AnnotationRecord::captions() const {
    std::vector<std::string> out;
    out.reserve(segments_.size());
    for (const auto& s : segments_) out.push_back(s.caption());
    return out;
}

}  // namespace procassess
