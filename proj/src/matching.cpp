#include "procassess/matching.hpp"

#include "procassess/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <tuple>

namespace procassess {

namespace {

void check_threshold(double threshold) {
    if (!(threshold > 0.0 && threshold <= 1.0)) {
        throw InvalidArgument("IoU threshold must lie in (0, 1]");
    }
}

void check_tolerance(double tolerance) {
    if (!(tolerance > 0.0) || !std::isfinite(tolerance)) {
        throw InvalidArgument("hit tolerance must be positive");
    }
}

double safe_ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

MatchResult greedy_match(std::span<const TimeInterval> preds, std::span<const TimeInterval> gts,
                         double threshold) {
    check_threshold(threshold);
    MatchResult result;
    result.threshold = threshold;

    std::vector<MatchedPair> candidates;
    for (std::size_t p = 0; p < preds.size(); ++p) {
        for (std::size_t g = 0; g < gts.size(); ++g) {
            const double v = iou(preds[p], gts[g]);
            if (v > 0.0 && v + kTimeEpsilon >= threshold) candidates.push_back({p, g, v});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
        if (a.iou != b.iou) return a.iou > b.iou;
        return std::tie(a.pred_index, a.gt_index) < std::tie(b.pred_index, b.gt_index);
    });

    std::vector<bool> pred_used(preds.size(), false);
    std::vector<bool> gt_used(gts.size(), false);
    for (const auto& c : candidates) {
        if (pred_used[c.pred_index] || gt_used[c.gt_index]) continue;
        pred_used[c.pred_index] = true;
        gt_used[c.gt_index] = true;
        result.pairs.push_back(c);
    }
    for (std::size_t p = 0; p < preds.size(); ++p) {
        if (!pred_used[p]) result.unmatched_pred.push_back(p);
    }
    for (std::size_t g = 0; g < gts.size(); ++g) {
        if (!gt_used[g]) result.unmatched_gt.push_back(g);
    }
    return result;
}

ThresholdedPRF ThresholdedPRF::from_counts(double threshold, std::size_t tp, std::size_t fp,
                                           std::size_t fn) {
    ThresholdedPRF r;
    r.threshold = threshold;
    r.tp = tp;
    r.fp = fp;
    r.fn = fn;
    r.precision = safe_ratio(tp, tp + fp);
    r.recall = safe_ratio(tp, tp + fn);
    const double sum = r.precision + r.recall;
    r.f1 = sum > 0.0 ? 2.0 * r.precision * r.recall / sum : 0.0;
    return r;
}

std::vector<ThresholdedPRF> prf_at_thresholds(std::span<const VideoIntervals> dataset,
                                              std::span<const double> thresholds) {
    if (thresholds.empty()) throw InvalidArgument("at least one IoU threshold is required");
    for (double th : thresholds) check_threshold(th);

    std::vector<ThresholdedPRF> out;
    out.reserve(thresholds.size());
    for (double th : thresholds) {
        std::size_t tp = 0, fp = 0, fn = 0;
        for (const auto& video : dataset) {
            const auto m = greedy_match(video.preds, video.gts, th);
            tp += m.pairs.size();
            fp += m.unmatched_pred.size();
            fn += m.unmatched_gt.size();
        }
        out.push_back(ThresholdedPRF::from_counts(th, tp, fp, fn));
    }
    return out;
}

std::size_t count_hits(std::span<const double> pred_starts, std::span<const double> gt_starts,
                       double tolerance) {
    check_tolerance(tolerance);
    struct Candidate {
        double distance;
        std::size_t gt;
        std::size_t pred;
    };
    std::vector<Candidate> candidates;
    for (std::size_t p = 0; p < pred_starts.size(); ++p) {
        for (std::size_t g = 0; g < gt_starts.size(); ++g) {
            const double d = std::abs(pred_starts[p] - gt_starts[g]);
            if (d <= tolerance + kTimeEpsilon) candidates.push_back({d, g, p});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
        return std::tie(a.distance, a.gt, a.pred) < std::tie(b.distance, b.gt, b.pred);
    });
    std::vector<bool> pred_used(pred_starts.size(), false);
    std::vector<bool> gt_used(gt_starts.size(), false);
    std::size_t hits = 0;
    for (const auto& c : candidates) {
        if (pred_used[c.pred] || gt_used[c.gt]) continue;
        pred_used[c.pred] = true;
        gt_used[c.gt] = true;
        ++hits;
    }
    return hits;
}

std::vector<HitRatioResult> hit_ratio(std::span<const double> pred_starts,
                                      std::span<const double> gt_starts,
                                      std::span<const double> tolerances) {
    if (gt_starts.empty()) throw InvalidArgument("hit ratio is undefined without ground truth");
    std::vector<HitRatioResult> out;
    out.reserve(tolerances.size());
    for (double tol : tolerances) {
        const std::size_t hits = count_hits(pred_starts, gt_starts, tol);
        out.push_back({tol, hits, gt_starts.size(), safe_ratio(hits, gt_starts.size())});
    }
    return out;
}

HitTally::HitTally(std::span<const double> tolerances)
    : tolerances_(tolerances.begin(), tolerances.end()), hits_(tolerances.size(), 0) {
    for (double tol : tolerances_) check_tolerance(tol);
}

void HitTally::add(std::span<const double> pred_starts, std::span<const double> gt_starts) {
    for (std::size_t i = 0; i < tolerances_.size(); ++i) {
        hits_[i] += count_hits(pred_starts, gt_starts, tolerances_[i]);
    }
    total_ += gt_starts.size();
}

void HitTally::add_miss(std::size_t gt_count) { total_ += gt_count; }

std::vector<HitRatioResult> HitTally::results() const {
    std::vector<HitRatioResult> out;
    for (std::size_t i = 0; i < tolerances_.size(); ++i) {
        out.push_back({tolerances_[i], hits_[i], total_, safe_ratio(hits_[i], total_)});
    }
    return out;
}

std::string normalize_label(std::string_view label) {
    std::string out;
    bool pending_space = false;
    for (unsigned char c : label) {
        if (std::isspace(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

double top1_accuracy(std::span<const std::string> pred_labels,
                     std::span<const std::string> gt_labels) {
    if (pred_labels.size() != gt_labels.size()) {
        throw InvalidArgument("top-1 accuracy needs equally long label lists");
    }
    if (gt_labels.empty()) throw InvalidArgument("top-1 accuracy of an empty list is undefined");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < gt_labels.size(); ++i) {
        if (normalize_label(pred_labels[i]) == normalize_label(gt_labels[i])) ++correct;
    }
    return safe_ratio(correct, gt_labels.size());
}

}  // namespace procassess
