#include "procassess/evaluate.hpp"

#include "io_util.hpp"
#include "procassess/errors.hpp"

#include <algorithm>

namespace procassess {

namespace {

double ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

std::vector<double> starts_of(std::span<const TimeInterval> intervals) {
    std::vector<double> out;
    out.reserve(intervals.size());
    for (const auto& iv : intervals) out.push_back(iv.start());
    return out;
}

std::vector<TimeInterval> intervals_of(std::span<const ActionSegment> segments) {
    std::vector<TimeInterval> out;
    out.reserve(segments.size());
    for (const auto& s : segments) out.push_back(s.interval());
    return out;
}

FailureEntry failure(Task task, const std::string& id, std::string reason) {
    return {std::string(to_string(task)), id, std::move(reason)};
}

// Parsed segments of a video, or empty plus a failure entry.
std::vector<ActionSegment> segments_for(Task task, std::span<const RawModelResponse> responses,
                                        const std::string& id, std::vector<FailureEntry>& failures) {
    const auto* r = find_response(responses, id);
    if (r == nullptr) {
        failures.push_back(failure(task, id, "no response"));
        return {};
    }
    if (!r->ok) {
        failures.push_back(failure(task, id, "request failed: " + r->error));
        return {};
    }
    auto parsed = parse_segment_list(r->text);
    if (parsed.failed()) {
        failures.push_back(failure(task, id, "no parseable segments (" +
                                                 std::to_string(parsed.malformed_lines) + " malformed lines)"));
    }
    return std::move(parsed.segments);
}

std::string join_levels(std::span<const double> values) {
    std::string out;
    for (double v : values) {
        if (!out.empty()) out += ",";
        out += format_level(v);
    }
    return out;
}

ReportBlock& block_for(MetricsReport& report, ReportBlockKind kind, std::string title,
                       std::vector<ReportColumn> columns) {
    for (auto& b : report.blocks) {
        if (b.kind != kind || b.columns.size() != columns.size()) continue;
        bool same = true;
        for (std::size_t i = 0; i < columns.size(); ++i) same = same && b.columns[i].name == columns[i].name;
        if (same) return b;
    }
    report.blocks.push_back({kind, std::move(title), std::move(columns), {}});
    return report.blocks.back();
}

void append_failures(MetricsReport& report, const std::vector<FailureEntry>& failures) {
    report.failures.insert(report.failures.end(), failures.begin(), failures.end());
}

}  // namespace

void EvalConfig::validate() const {
    if (iou_thresholds.empty()) throw InvalidArgument("at least one IoU threshold is required");
    for (double t : iou_thresholds) {
        if (!(t > 0.0 && t <= 1.0)) throw InvalidArgument("IoU thresholds must lie in (0, 1]");
    }
    if (!(caption_threshold > 0.0 && caption_threshold <= 1.0)) {
        throw InvalidArgument("caption threshold must lie in (0, 1]");
    }
    for (const auto* list : {&hit_tolerances, &missing_tolerances}) {
        if (list->empty()) throw InvalidArgument("at least one hit tolerance is required");
        for (double t : *list) {
            if (!(t > 0.0)) throw InvalidArgument("hit tolerances must be positive");
        }
    }
}

const RawModelResponse* find_response(std::span<const RawModelResponse> responses,
                                      const std::string& request_id) {
    const RawModelResponse* found = nullptr;
    for (const auto& r : responses) {
        if (r.request_id != request_id) continue;
        if (r.ok || found == nullptr || !found->ok) found = &r;
    }
    return found;
}

bool sample_in_task(const PerturbedSample& sample, Task task) noexcept {
    switch (task) {
        case Task::missing_event:
            return sample.kind == PerturbationKind::mask || sample.kind == PerturbationKind::keep;
        case Task::order_correction:
            return sample.kind != PerturbationKind::mask;
        default:
            return false;
    }
}

ProcedureIdResult evaluate_procedure_id(std::span<const AnnotationRecord> records,
                                        std::span<const RawModelResponse> responses,
                                        const EvalConfig& config) {
    config.validate();
    ProcedureIdResult result;
    result.videos = records.size();
    if (records.empty()) throw InvalidArgument("procedure identification needs at least one video");

    std::vector<std::string> predicted, truth;
    std::vector<VideoIntervals> dataset;
    HitTally hits(config.hit_tolerances);
    double coverage_sum = 0.0;
    for (const auto& rec : records) {
        const auto id = make_request_id(Task::procedure_id, rec.video_id());
        const auto* r = find_response(responses, id);
        std::string label;
        if (r != nullptr && r->ok) label = parse_procedure_label(r->text).value_or("");
        predicted.push_back(label);
        truth.push_back(rec.procedure_label());

        const auto segs = segments_for(Task::procedure_id, responses, id, result.failures);
        VideoIntervals video{intervals_of(segs), rec.intervals()};
        coverage_sum += coverage_fraction(video.gts, video.preds);
        const auto pred_starts = starts_of(video.preds);
        const auto gt_starts = starts_of(video.gts);
        hits.add(pred_starts, gt_starts);
        dataset.push_back(std::move(video));
    }
    result.top1_accuracy = top1_accuracy(predicted, truth);
    result.prf = prf_at_thresholds(dataset, config.iou_thresholds);
    result.avg_coverage = coverage_sum / static_cast<double>(records.size());
    result.hits = hits.results();
    double sum = 0.0;
    for (const auto& h : result.hits) sum += h.ratio;
    result.avg_hit = result.hits.empty() ? 0.0 : sum / static_cast<double>(result.hits.size());
    return result;
}

DenseCaptionResult evaluate_dense_caption(std::span<const AnnotationRecord> records,
                                          std::span<const RawModelResponse> responses,
                                          const EvalConfig& config) {
    config.validate();
    DenseCaptionResult result;
    result.videos = records.size();
    std::vector<VideoIntervals> dataset;
    CaptionTally captions;
    for (const auto& rec : records) {
        const auto id = make_request_id(Task::dense_caption, rec.video_id());
        const auto segs = segments_for(Task::dense_caption, responses, id, result.failures);
        VideoIntervals video{intervals_of(segs), rec.intervals()};
        const auto matches = greedy_match(video.preds, video.gts, config.caption_threshold);
        for (const auto& pair : matches.pairs) {
            captions.add(rec.segments()[pair.gt_index].caption(), segs[pair.pred_index].caption());
        }
        dataset.push_back(std::move(video));
    }
    result.prf = prf_at_thresholds(dataset, config.iou_thresholds);
    result.captions = captions.mean();
    result.caption_pairs = captions.pairs();
    return result;
}

MissingEventResult evaluate_missing_event(std::span<const PerturbedSample> samples,
                                          std::span<const RawModelResponse> responses,
                                          const EvalConfig& config) {
    config.validate();
    MissingEventResult result;
    HitTally hits(config.missing_tolerances);
    for (const auto& sample : samples) {
        if (!sample_in_task(sample, Task::missing_event)) continue;
        ++result.samples;
        const bool positive = sample.kind == PerturbationKind::mask;
        const auto id = make_request_id(Task::missing_event, sample.sample_id);
        const auto* r = find_response(responses, id);

        MissingParse parse;
        if (r == nullptr) parse.note = "no response";
        else if (!r->ok) parse.note = "request failed: " + r->error;
        else parse = parse_missing_verdict(r->text);

        if (parse.abstained()) {
            ++result.abstentions;
            result.failures.push_back(failure(Task::missing_event, id, "abstention: " + parse.note));
            if (positive) {
                ++result.fn;
                if (!config.exclude_abstentions) hits.add_miss(1);
            } else {
                ++result.tn;
            }
            continue;
        }
        const auto& v = *parse.verdict;
        if (positive) {
            if (v.has_missing) ++result.tp; else ++result.fn;
            const double gt_start = sample.mask_truth()->masked_interval.start();
            if (v.has_missing && v.predicted_interval) {
                const double pred_start = v.predicted_interval->start();
                hits.add(std::span(&pred_start, 1), std::span(&gt_start, 1));
            } else {
                hits.add_miss(1);
            }
        } else {
            if (v.has_missing) ++result.fp; else ++result.tn;
        }
    }
    result.precision = ratio(result.tp, result.tp + result.fp);
    result.recall = ratio(result.tp, result.tp + result.fn);
    result.f1 = harmonic(result.precision, result.recall);
    result.hits = hits.results();
    return result;
}

OrderErrorResult evaluate_order_error(std::span<const PerturbedSample> samples,
                                      std::span<const RawModelResponse> responses,
                                      const EvalConfig& config) {
    config.validate();
    OrderErrorResult result;
    HitTally hits(config.hit_tolerances);
    std::size_t verdict_right = 0;
    for (const auto& sample : samples) {
        if (!sample_in_task(sample, Task::order_correction)) continue;
        const auto* truth = sample.order_truth();
        if (truth == nullptr) continue;
        ++result.samples;
        const auto id = make_request_id(Task::order_correction, sample.sample_id);
        const auto& shown = truth->perturbed_segments;

        std::vector<double> gt_starts;
        for (auto k : truth->misplaced_indices) gt_starts.push_back(shown[k].interval().start());

        const auto* r = find_response(responses, id);
        OrderParse parse;
        if (r == nullptr) parse.note = "no response";
        else if (!r->ok) parse.note = "request failed: " + r->error;
        else parse = parse_order_verdict(r->text, shown.size());

        if (parse.abstained()) {
            ++result.abstentions;
            result.failures.push_back(failure(Task::order_correction, id, "abstention: " + parse.note));
            if (!config.exclude_abstentions) hits.add_miss(gt_starts.size());
            continue;
        }
        const auto& v = *parse.verdict;
        if (v.is_correct == truth->is_correct) ++verdict_right;

        std::vector<double> pred_starts;
        if (!v.misplaced_intervals.empty()) {
            pred_starts = starts_of(v.misplaced_intervals);
        } else {
            for (auto k : v.misplaced) {
                if (k < shown.size()) pred_starts.push_back(shown[k].interval().start());
            }
        }
        if (v.is_correct) pred_starts.clear();
        hits.add(pred_starts, gt_starts);
    }
    result.hits = hits.results();
    result.verdict_accuracy = ratio(verdict_right, result.samples);
    return result;
}

void add_to_report(MetricsReport& report, const ProcedureIdResult& result, const EvalConfig& config) {
    auto& acc = block_for(report, ReportBlockKind::procedure_accuracy, "Procedure identification",
                          procedure_accuracy_columns());
    acc.rows.push_back({config.model, {result.top1_accuracy * 100.0}, {{"videos", static_cast<double>(result.videos)}}});

    auto& coarse = block_for(report, ReportBlockKind::coarse_segmentation, "Coarse temporal segmentation",
                             coarse_segmentation_columns(config.iou_thresholds));
    ReportRow row{config.model, {}, {}};
    for (const auto& p : result.prf) {
        row.values.push_back(p.f1);
        const auto at = "@" + format_level(p.threshold);
        row.details["tp" + at] = static_cast<double>(p.tp);
        row.details["fp" + at] = static_cast<double>(p.fp);
        row.details["fn" + at] = static_cast<double>(p.fn);
    }
    row.values.push_back(result.avg_coverage);
    row.values.push_back(result.avg_hit);
    for (const auto& h : result.hits) row.details["hit@" + format_level(h.tolerance) + "s"] = h.ratio;
    coarse.rows.push_back(std::move(row));
    report.meta["iou_thresholds"] = join_levels(config.iou_thresholds);
    report.meta["hit_tolerances"] = join_levels(config.hit_tolerances);
    append_failures(report, result.failures);
}

void add_to_report(MetricsReport& report, const DenseCaptionResult& result, const EvalConfig& config) {
    auto& block = block_for(report, ReportBlockKind::dense_caption, "Dense captioning",
                            dense_caption_columns(config.iou_thresholds));
    ReportRow row{config.model, {}, {{"videos", static_cast<double>(result.videos)},
                                     {"caption_pairs", static_cast<double>(result.caption_pairs)}}};
    for (const auto& p : result.prf) {
        row.values.insert(row.values.end(), {p.precision, p.recall, p.f1});
        const auto at = "@" + format_level(p.threshold);
        row.details["tp" + at] = static_cast<double>(p.tp);
        row.details["fp" + at] = static_cast<double>(p.fp);
        row.details["fn" + at] = static_cast<double>(p.fn);
    }
    row.values.push_back(result.captions.rouge_l);
    row.values.push_back(result.captions.token_f1);
    block.rows.push_back(std::move(row));
    report.meta["iou_thresholds"] = join_levels(config.iou_thresholds);
    report.meta["caption_threshold"] = format_level(config.caption_threshold);
    append_failures(report, result.failures);
}

void add_to_report(MetricsReport& report, const MissingEventResult& result, const EvalConfig& config) {
    auto& block = block_for(report, ReportBlockKind::missing_event, "Missing action detection",
                            missing_event_columns(config.missing_tolerances));
    ReportRow row{config.model, {result.precision, result.recall, result.f1},
                  {{"samples", static_cast<double>(result.samples)},
                   {"tp", static_cast<double>(result.tp)},
                   {"fp", static_cast<double>(result.fp)},
                   {"fn", static_cast<double>(result.fn)},
                   {"tn", static_cast<double>(result.tn)},
                   {"abstentions", static_cast<double>(result.abstentions)}}};
    for (const auto& h : result.hits) row.values.push_back(h.ratio);
    block.rows.push_back(std::move(row));
    report.meta["missing_tolerances"] = join_levels(config.missing_tolerances);
    append_failures(report, result.failures);
}

void add_to_report(MetricsReport& report, const OrderErrorResult& result, const EvalConfig& config) {
    auto& block = block_for(report, ReportBlockKind::order_error, "Sequence order error detection",
                            order_error_columns(config.hit_tolerances));
    ReportRow row{config.model, {},
                  {{"samples", static_cast<double>(result.samples)},
                   {"verdict_accuracy", result.verdict_accuracy},
                   {"abstentions", static_cast<double>(result.abstentions)}}};
    for (const auto& h : result.hits) row.values.push_back(h.ratio);
    block.rows.push_back(std::move(row));
    report.meta["hit_tolerances"] = join_levels(config.hit_tolerances);
    append_failures(report, result.failures);
}

}  // namespace procassess
