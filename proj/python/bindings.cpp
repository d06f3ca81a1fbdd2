#include "procassess/errors.hpp"
#include "procassess/matching.hpp"
#include "procassess/report.hpp"
#include "procassess/responses.hpp"
#include "procassess/temporal.hpp"
#include "procassess/text_metrics.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace procassess;

namespace {

using Span = std::pair<double, double>;

std::vector<TimeInterval> to_intervals(const std::vector<Span>& spans) {
    std::vector<TimeInterval> out;
    out.reserve(spans.size());
    for (const auto& [s, e] : spans) out.emplace_back(s, e);
    return out;
}

py::dict segment_dict(const ActionSegment& seg) {
    py::dict d;
    d["start"] = seg.interval().start();
    d["end"] = seg.interval().end();
    d["caption"] = seg.caption();
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Temporal matching, caption metrics and response parsing.";

    py::register_exception<InputError>(m, "InputError", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_RuntimeError);
    py::register_exception<NetworkError>(m, "NetworkError", PyExc_RuntimeError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);

    py::class_<TimeInterval>(m, "TimeInterval")
        .def(py::init<double, double>(), py::arg("start"), py::arg("end"))
        .def_property_readonly("start", &TimeInterval::start)
        .def_property_readonly("end", &TimeInterval::end)
        .def_property_readonly("length", &TimeInterval::length)
        .def("__eq__", [](const TimeInterval& a, const TimeInterval& b) { return a == b; })
        .def("__repr__", [](const TimeInterval& t) {
            return "TimeInterval(" + py::repr(py::float_(t.start())).cast<std::string>() + ", " +
                   py::repr(py::float_(t.end())).cast<std::string>() + ")";
        });

    m.def("iou", [](const Span& a, const Span& b) { return iou(TimeInterval(a.first, a.second), TimeInterval(b.first, b.second)); },
          py::arg("a"), py::arg("b"));
    m.def("coverage_fraction",
          [](const std::vector<Span>& gt, const std::vector<Span>& pred) {
              return coverage_fraction(to_intervals(gt), to_intervals(pred));
          },
          py::arg("gt"), py::arg("pred"));
    m.def("seconds_to_frames",
          [](const Span& s, double fps) {
              const auto r = seconds_to_frames(TimeInterval(s.first, s.second), fps);
              return std::make_pair(r.first(), r.last_exclusive());
          },
          py::arg("interval"), py::arg("fps") = 1.0);

    m.def("greedy_match",
          [](const std::vector<Span>& preds, const std::vector<Span>& gts, double threshold) {
              const auto r = greedy_match(to_intervals(preds), to_intervals(gts), threshold);
              std::vector<std::tuple<std::size_t, std::size_t, double>> pairs;
              for (const auto& p : r.pairs) pairs.emplace_back(p.pred_index, p.gt_index, p.iou);
              return pairs;
          },
          py::arg("preds"), py::arg("gts"), py::arg("threshold"),
          "List of (pred_index, gt_index, iou) in acceptance order.");
    m.def("prf_at_thresholds",
          [](const std::vector<std::pair<std::vector<Span>, std::vector<Span>>>& videos,
             const std::vector<double>& thresholds) {
              std::vector<VideoIntervals> data;
              for (const auto& [p, g] : videos) data.push_back({to_intervals(p), to_intervals(g)});
              py::list out;
              for (const auto& r : prf_at_thresholds(data, thresholds)) {
                  py::dict d;
                  d["threshold"] = r.threshold;
                  d["tp"] = r.tp;
                  d["fp"] = r.fp;
                  d["fn"] = r.fn;
                  d["precision"] = r.precision;
                  d["recall"] = r.recall;
                  d["f1"] = r.f1;
                  out.append(d);
              }
              return out;
          },
          py::arg("videos"),
          py::arg("thresholds") = std::vector<double>(kDefaultIouThresholds.begin(), kDefaultIouThresholds.end()));
    m.def("hit_ratio",
          [](const std::vector<double>& preds, const std::vector<double>& gts, const std::vector<double>& tols) {
              std::vector<double> out;
              for (const auto& r : hit_ratio(preds, gts, tols)) out.push_back(r.ratio);
              return out;
          },
          py::arg("pred_starts"), py::arg("gt_starts"),
          py::arg("tolerances") = std::vector<double>(kDefaultHitTolerances.begin(), kDefaultHitTolerances.end()));
    m.def("top1_accuracy", [](const std::vector<std::string>& p, const std::vector<std::string>& g) { return top1_accuracy(p, g); },
          py::arg("pred_labels"), py::arg("gt_labels"));

    m.def("normalize", [](std::string_view text) { return normalize(text).tokens(); }, py::arg("text"));
    m.def("rouge_l", [](std::string_view ref, std::string_view cand) { return rouge_l(normalize(ref), normalize(cand)); },
          py::arg("reference"), py::arg("candidate"));
    m.def("token_f1", [](std::string_view ref, std::string_view cand) { return token_f1(normalize(ref), normalize(cand)); },
          py::arg("reference"), py::arg("candidate"));

    m.def("parse_time", [](std::string_view t) { return parse_time(t); }, py::arg("text"));
    m.def("parse_segment_list",
          [](std::string_view text) {
              const auto r = parse_segment_list(text);
              py::list segs;
              for (const auto& s : r.segments) segs.append(segment_dict(s));
              py::dict d;
              d["segments"] = segs;
              d["malformed_lines"] = r.malformed_lines;
              d["structured"] = r.structured;
              return d;
          },
          py::arg("text"));
    m.def("parse_order_verdict",
          [](std::string_view text, std::size_t segment_count) -> py::object {
              const auto r = parse_order_verdict(text, segment_count);
              if (r.abstained()) return py::none();
              py::dict d;
              d["is_correct"] = r.verdict->is_correct;
              d["misplaced"] = r.verdict->misplaced;
              d["corrected_order"] = r.verdict->corrected_order;
              return d;
          },
          py::arg("text"), py::arg("segment_count"), "None when the response abstains.");
    m.def("parse_missing_verdict",
          [](std::string_view text) -> py::object {
              const auto r = parse_missing_verdict(text);
              if (r.abstained()) return py::none();
              py::dict d;
              d["has_missing"] = r.verdict->has_missing;
              d["caption"] = r.verdict->predicted_caption;
              if (r.verdict->predicted_interval)
                  d["interval"] = std::make_pair(r.verdict->predicted_interval->start(), r.verdict->predicted_interval->end());
              else
                  d["interval"] = py::none();
              return d;
          },
          py::arg("text"), "None when the response abstains.");

    m.def("render_report",
          [](std::string_view structured, std::string_view format) {
              return render_report(parse_structured_report(structured), parse_report_format(format));
          },
          py::arg("structured_report"), py::arg("format"),
          "Re-render a JSON report into csv or markdown; returns {file name: contents}.");
}
