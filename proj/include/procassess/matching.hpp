#pragma once

#include "procassess/temporal.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace procassess {

inline constexpr std::array<double, 3> kDefaultIouThresholds{0.3, 0.5, 0.7};
inline constexpr std::array<double, 3> kDefaultHitTolerances{0.5, 1.0, 2.0};

struct MatchedPair {
    std::size_t pred_index;
    std::size_t gt_index;
    double iou;
};

struct MatchResult {
    double threshold = 0.0;
    std::vector<MatchedPair> pairs;
    std::vector<std::size_t> unmatched_pred;
    std::vector<std::size_t> unmatched_gt;
};

/// Greedy one-to-one matching. Every (pred, gt) pair with IoU >= threshold is
/// ranked by IoU descending, ties by lower pred index then lower gt index, and
/// accepted when both sides are still free. Lowering the threshold only appends
/// pairs after the existing ones, so the number of matches never decreases.
[[nodiscard]] MatchResult greedy_match(std::span<const TimeInterval> preds,
                                       std::span<const TimeInterval> gts, double threshold);

struct ThresholdedPRF {
    double threshold = 0.0;
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;

    static ThresholdedPRF from_counts(double threshold, std::size_t tp, std::size_t fp,
                                      std::size_t fn);
};

/// Predicted and ground-truth intervals of one video.
struct VideoIntervals {
    std::vector<TimeInterval> preds;
    std::vector<TimeInterval> gts;
};

/// Micro-averaged P/R/F1: counts are summed over every video before the ratios.
[[nodiscard]] std::vector<ThresholdedPRF> prf_at_thresholds(
    std::span<const VideoIntervals> dataset,
    std::span<const double> thresholds = kDefaultIouThresholds);

struct HitRatioResult {
    double tolerance = 0.0;
    std::size_t hits = 0;
    std::size_t total_gt = 0;
    double ratio = 0.0;
};

/// Number of ground-truth starts hit by a prediction start within `tolerance`.
/// Candidate pairs are taken nearest-first (ties: earlier gt, then earlier
/// prediction) and each prediction and gt is used at most once.
[[nodiscard]] std::size_t count_hits(std::span<const double> pred_starts,
                                     std::span<const double> gt_starts, double tolerance);

/// Hit ratio per tolerance. Throws InvalidArgument when `gt_starts` is empty.
[[nodiscard]] std::vector<HitRatioResult> hit_ratio(
    std::span<const double> pred_starts, std::span<const double> gt_starts,
    std::span<const double> tolerances = kDefaultHitTolerances);

/// Pools hit counts over many videos; the ratio is global (hits / all gt events).
class HitTally {
public:
    explicit HitTally(std::span<const double> tolerances = kDefaultHitTolerances);

    void add(std::span<const double> pred_starts, std::span<const double> gt_starts);
    /// Counts `gt_count` events as missed at every tolerance.
    void add_miss(std::size_t gt_count);

    [[nodiscard]] std::size_t total_gt() const noexcept { return total_; }
    /// Ratios are 0 when no gt events were added.
    [[nodiscard]] std::vector<HitRatioResult> results() const;

private:
    std::vector<double> tolerances_;
    std::vector<std::size_t> hits_;
    std::size_t total_ = 0;
};

/// Lowercase, trim and collapse internal whitespace.
[[nodiscard]] std::string normalize_label(std::string_view label);

[[nodiscard]] double top1_accuracy(std::span<const std::string> pred_labels,
                                   std::span<const std::string> gt_labels);

}  // namespace procassess
