#pragma once

#include "procassess/matching.hpp"
#include "procassess/perturb.hpp"
#include "procassess/report.hpp"
#include "procassess/responses.hpp"
#include "procassess/temporal.hpp"
#include "procassess/text_metrics.hpp"

#include <span>
#include <string>
#include <vector>

namespace procassess {

struct EvalConfig {
    std::string model = "model";
    std::vector<double> iou_thresholds{kDefaultIouThresholds.begin(), kDefaultIouThresholds.end()};
    std::vector<double> hit_tolerances{kDefaultHitTolerances.begin(), kDefaultHitTolerances.end()};
    std::vector<double> missing_tolerances{0.5, 1.0};
    /// IoU of the match set whose pairs are caption-scored.
    double caption_threshold = 0.3;
    /// Leave abstentions out of hit-ratio denominators instead of scoring them as misses.
    bool exclude_abstentions = false;

    void validate() const;
};

struct ProcedureIdResult {
    std::size_t videos = 0;
    double top1_accuracy = 0.0;
    std::vector<ThresholdedPRF> prf;
    /// Mean of per-video coverage fractions.
    double avg_coverage = 0.0;
    /// Global hit ratios over all gt starts, one per tolerance.
    std::vector<HitRatioResult> hits;
    /// Mean of `hits` over tolerances.
    double avg_hit = 0.0;
    std::vector<FailureEntry> failures;
};

struct DenseCaptionResult {
    std::size_t videos = 0;
    std::vector<ThresholdedPRF> prf;
    CaptionScore captions;
    std::size_t caption_pairs = 0;
    std::vector<FailureEntry> failures;
};

struct MissingEventResult {
    std::size_t samples = 0;
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    double precision = 0.0, recall = 0.0, f1 = 0.0;
    std::vector<HitRatioResult> hits;
    std::size_t abstentions = 0;
    std::vector<FailureEntry> failures;
};

struct OrderErrorResult {
    std::size_t samples = 0;
    std::vector<HitRatioResult> hits;
    /// Fraction of samples whose correct/incorrect verdict matches (abstentions count wrong).
    double verdict_accuracy = 0.0;
    std::size_t abstentions = 0;
    std::vector<FailureEntry> failures;
};

/// Latest successful response per request id (a resumed dump may repeat ids).
[[nodiscard]] const RawModelResponse* find_response(std::span<const RawModelResponse> responses,
                                                    const std::string& request_id);

/// Procedure name plus coarse segments on untrimmed videos.
[[nodiscard]] ProcedureIdResult evaluate_procedure_id(std::span<const AnnotationRecord> records,
                                                      std::span<const RawModelResponse> responses,
                                                      const EvalConfig& config = {});

/// Dense segments with captions. Unparseable videos score fn = |gt|, fp = 0.
[[nodiscard]] DenseCaptionResult evaluate_dense_caption(std::span<const AnnotationRecord> records,
                                                        std::span<const RawModelResponse> responses,
                                                        const EvalConfig& config = {});

/// Masked samples are positives, pass-through samples negatives; other kinds are ignored.
[[nodiscard]] MissingEventResult evaluate_missing_event(std::span<const PerturbedSample> samples,
                                                        std::span<const RawModelResponse> responses,
                                                        const EvalConfig& config = {});

/// Swap/shift/keep samples; hits compare misplaced-segment start times.
[[nodiscard]] OrderErrorResult evaluate_order_error(std::span<const PerturbedSample> samples,
                                                    std::span<const RawModelResponse> responses,
                                                    const EvalConfig& config = {});

/// Samples that take part in a task's evaluation and inference.
[[nodiscard]] bool sample_in_task(const PerturbedSample& sample, Task task) noexcept;

void add_to_report(MetricsReport& report, const ProcedureIdResult& result, const EvalConfig& config);
void add_to_report(MetricsReport& report, const DenseCaptionResult& result, const EvalConfig& config);
void add_to_report(MetricsReport& report, const MissingEventResult& result, const EvalConfig& config);
void add_to_report(MetricsReport& report, const OrderErrorResult& result, const EvalConfig& config);

}  // namespace procassess
