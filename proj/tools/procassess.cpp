// procassess command-line entry point. Data goes to files (or stdout for
// --dry-run); logs are JSON lines on stderr.

#include "CLI11.hpp"

#include "procassess/annotations.hpp"
#include "procassess/dataset.hpp"
#include "procassess/errors.hpp"
#include "procassess/evaluate.hpp"
#include "procassess/infer.hpp"
#include "procassess/log.hpp"
#include "procassess/manifest.hpp"
#include "procassess/media.hpp"
#include "procassess/prompt.hpp"
#include "procassess/report.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using namespace procassess;

namespace {

enum ExitCode : int {
    kOk = 0,
    kInternal = 1,
    kUsage = 2,
    kInputError = 3,
    kParseFailure = 4,
    kNetworkFailure = 5,
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

// Runs fn(i) for i in [0, n) on at most `jobs` threads; rethrows the first error.
template <class Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn fn) {
    std::atomic<std::size_t> next{0};
    std::exception_ptr first;
    std::mutex m;
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(m);
                if (!first) first = std::current_exception();
                next.store(n);
            }
        }
    };
    const auto count = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < count; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (first) std::rethrow_exception(first);
}

void validate_levels(const std::vector<double>& values, bool unit, const char* what) {
    if (values.empty()) throw InvalidArgument(std::string("at least one ") + what + " is required");
    for (double v : values) {
        if (unit ? !(v > 0.0 && v <= 1.0) : !(v > 0.0)) {
            throw InvalidArgument(std::string(what) + " " + fmt(v) + (unit ? " is outside (0, 1]" : " is not positive"));
        }
    }
}

std::vector<ReportFormat> formats_from(const std::vector<std::string>& names) {
    std::vector<ReportFormat> out;
    for (const auto& n : names) {
        if (n == "all") return {ReportFormat::csv, ReportFormat::markdown, ReportFormat::structured};
        out.push_back(parse_report_format(n));
    }
    return out;
}

// --- storyboard -------------------------------------------------------------

struct StoryboardArgs {
    std::string frames;
    std::string out;
    std::string sidecar;
    double fps = 1.0;
    bool no_overlay = false;
    int max_width = 16384;
};

void make_storyboard(const fs::path& frames, const fs::path& png, const fs::path& sidecar, double fps,
                     bool overlay, int max_width) {
    StoryboardOptions opts;
    opts.overlay = overlay;
    opts.max_width = max_width;
    const auto board = compose_storyboard(sample_frames(frames, fps), OverlayStyle{}, opts);
    write_storyboard(board, fps, png, sidecar);
}

fs::path sidecar_for(const fs::path& png) {
    auto p = png;
    p.replace_extension(".json");
    return p;
}

int cmd_storyboard(const StoryboardArgs& a) {
    if (!(a.fps > 0.0)) throw InvalidArgument("--fps must be positive");
    const fs::path png = a.out;
    const fs::path sidecar = a.sidecar.empty() ? sidecar_for(png) : fs::path(a.sidecar);
    make_storyboard(a.frames, png, sidecar, a.fps, !a.no_overlay, a.max_width);
    log_event(LogLevel::info, "storyboard_written", {{"image", png.string()}, {"sidecar", sidecar.string()}});
    return kOk;
}

// --- perturb ----------------------------------------------------------------

struct PerturbArgs {
    std::string annotations;
    std::string frames_root;
    std::vector<std::string> kinds{"mask", "swap", "shift", "keep"};
    std::vector<std::size_t> counts;
    std::uint64_t seed = 0;
    double fps = 1.0;
    std::string out;
    bool storyboards = false;
    bool no_overlay = false;
    unsigned jobs = 0;
};

int cmd_perturb(const PerturbArgs& a) {
    if (!a.counts.empty() && a.counts.size() != a.kinds.size()) {
        throw InvalidArgument("--counts needs one value per --kinds entry");
    }
    if (a.storyboards && a.frames_root.empty()) throw InvalidArgument("--storyboards requires --frames-root");
    const auto records = parse_annotations(a.annotations);
    SynthesisPlan plan;
    plan.root_seed = a.seed;
    plan.fps = a.fps;
    plan.annotations_source = fs::path(a.annotations).filename().string();
    for (std::size_t i = 0; i < a.kinds.size(); ++i) {
        KindQuota q{parse_perturbation_kind(a.kinds[i]), std::nullopt};
        if (!a.counts.empty()) q.count = a.counts[i];
        plan.quotas.push_back(q);
    }
    const auto result = synthesize_dataset(records, plan);
    for (const auto& s : result.skipped) {
        log_event(LogLevel::warn, "sample_skipped",
                  {{"video_id", s.video_id}, {"kind", std::string(to_string(s.kind))}, {"reason", s.reason}});
    }
    const fs::path out = a.out;
    const auto manifest_path = out / "manifest.jsonl";
    write_manifest(manifest_path, result.manifest);

    const auto& samples = result.manifest.samples;
    if (!a.frames_root.empty()) {
        const unsigned jobs = a.jobs ? a.jobs : std::max(1u, std::thread::hardware_concurrency());
        parallel_for(samples.size(), jobs, [&](std::size_t i) {
            const auto& s = samples[i];
            const auto dir = out / "frames" / s.sample_id;
            apply_frame_plan(s, fs::path(a.frames_root) / s.source_video_id, dir);
            if (a.storyboards) {
                const auto png = out / "storyboards" / (s.sample_id + ".png");
                make_storyboard(dir, png, sidecar_for(png), s.fps, !a.no_overlay, 16384);
            }
        });
    }
    log_event(LogLevel::info, "dataset_written",
              {{"manifest", manifest_path.string()}, {"samples", std::to_string(samples.size())},
               {"skipped", std::to_string(result.skipped.size())}, {"root_seed", std::to_string(a.seed)}});
    return kOk;
}

// --- infer ------------------------------------------------------------------

struct InferArgs {
    std::string task;
    std::string annotations;
    std::string manifest;
    std::string storyboards;
    std::string prompts;
    std::string out;
    std::string backend = "openai";
    bool dry_run = false;
    bool fresh = false;
    std::optional<std::string> base_url;
    std::optional<std::string> model;
    std::optional<double> timeout;
    std::optional<int> max_parallel;
    std::optional<int> max_retries;
    std::optional<double> backoff_base;
    std::optional<std::uint64_t> jitter_seed;
};

struct PreparedRequests {
    std::vector<RenderedRequest> requests;
    std::map<std::string, std::string> oracle;  // request id -> ground-truth answer
};

std::optional<fs::path> storyboard_path(const std::string& dir, const std::string& item) {
    if (dir.empty()) return std::nullopt;
    auto p = fs::path(dir) / (item + ".png");
    std::error_code ec;
    if (!fs::exists(p, ec)) {
        log_event(LogLevel::warn, "storyboard_missing", {{"path", p.string()}});
        return std::nullopt;
    }
    return p;
}

PreparedRequests prepare_requests(const InferArgs& a, Task task) {
    const auto prompts = a.prompts.empty() ? default_prompt_set() : load_prompt_set(a.prompts);
    const auto& tmpl = template_for(prompts, to_string(task));
    PreparedRequests out;
    if (task == Task::procedure_id || task == Task::dense_caption) {
        if (a.annotations.empty()) throw InvalidArgument("--annotations is required for this task");
        for (const auto& rec : parse_annotations(a.annotations)) {
            auto req = build_prompt(tmpl, rec, storyboard_path(a.storyboards, rec.video_id()));
            out.oracle[req.request_id] = oracle_response(task, rec);
            out.requests.push_back(std::move(req));
        }
    } else {
        if (a.manifest.empty()) throw InvalidArgument("--manifest is required for this task");
        for (const auto& s : read_manifest(a.manifest).samples) {
            if (!sample_in_task(s, task)) continue;
            auto req = build_prompt(tmpl, s, storyboard_path(a.storyboards, s.sample_id));
            out.oracle[req.request_id] = oracle_response(task, s);
            out.requests.push_back(std::move(req));
        }
    }
    return out;
}

EndpointConfig endpoint_from(const InferArgs& a) {
    auto c = EndpointConfig::from_environment();
    if (a.base_url) c.base_url = *a.base_url;
    if (a.model) c.model_name = *a.model;
    if (a.timeout) c.request_timeout = *a.timeout;
    if (a.max_parallel) c.max_parallel = *a.max_parallel;
    if (a.max_retries) c.max_retries = *a.max_retries;
    if (a.backoff_base) c.backoff_base = *a.backoff_base;
    if (a.jitter_seed) c.jitter_seed = *a.jitter_seed;
    c.validate();
    return c;
}

int cmd_infer(const InferArgs& a) {
    const auto task = parse_task(a.task);
    if (a.backend != "openai" && a.backend != "oracle") throw InvalidArgument("--backend must be openai or oracle");
    auto prepared = prepare_requests(a, task);
    if (prepared.requests.empty()) throw InvalidArgument("no items for task '" + a.task + "'");

    if (a.dry_run) {
        for (const auto& r : prepared.requests) {
            nlohmann::ordered_json line = {{"request_id", r.request_id}, {"task", to_string(r.task)},
                                           {"video_id", r.video_id}, {"system", r.system}, {"user", r.user},
                                           {"image", r.image ? r.image->string() : ""}};
            std::cout << line.dump() << "\n";
        }
        std::cout.flush();
        log_event(LogLevel::info, "dry_run", {{"requests", std::to_string(prepared.requests.size())}});
        return kOk;
    }
    if (a.out.empty()) throw InvalidArgument("--out is required unless --dry-run is given");

    const auto config = endpoint_from(a);
    const fs::path dump_path = a.out;
    if (a.fresh) {
        std::error_code ec;
        fs::remove(dump_path, ec);
    }
    const auto done = completed_request_ids(dump_path);
    std::vector<RenderedRequest> todo;
    for (auto& r : prepared.requests) {
        if (!done.count(r.request_id)) todo.push_back(std::move(r));
    }
    if (!done.empty()) {
        log_event(LogLevel::info, "resume", {{"completed", std::to_string(done.size())},
                                             {"remaining", std::to_string(todo.size())}});
    }
    if (todo.empty()) return kOk;

    std::unique_ptr<Transport> transport;
    if (a.backend == "oracle") {
        transport = std::make_unique<CannedTransport>(std::move(prepared.oracle));
    } else {
        if (config.api_key.empty()) {
            log_event(LogLevel::warn, "no_api_key", {{"hint", std::string(kApiKeyEnv) + " is unset"}});
        }
        transport = std::make_unique<HttpTransport>(config);
    }
    DumpWriter writer(dump_path);
    InferOptions options;
    options.dump = &writer;
    const auto responses = infer_batch(todo, config, *transport, options);
    std::size_t failed = 0;
    for (const auto& r : responses) {
        if (!r.ok) {
            ++failed;
            log_event(LogLevel::error, "request_failed",
                      {{"request_id", r.request_id}, {"status", std::to_string(r.http_status)}, {"error", r.error}});
        }
    }
    log_event(LogLevel::info, "dump_written", {{"path", dump_path.string()},
                                               {"responses", std::to_string(responses.size())},
                                               {"failed", std::to_string(failed)}});
    return failed ? kNetworkFailure : kOk;
}

// --- evaluate ---------------------------------------------------------------

struct EvaluateArgs {
    std::vector<std::string> tasks;
    std::string annotations;
    std::string manifest;
    std::vector<std::string> dumps;
    std::string out;
    std::vector<std::string> formats{"all"};
    std::vector<double> thresholds{kDefaultIouThresholds.begin(), kDefaultIouThresholds.end()};
    std::vector<double> tolerances{kDefaultHitTolerances.begin(), kDefaultHitTolerances.end()};
    std::vector<double> missing_tolerances{0.5, 1.0};
    double caption_threshold = 0.3;
    std::string model = "model";
    bool exclude_abstentions = false;
};

int cmd_evaluate(const EvaluateArgs& a) {
    validate_levels(a.thresholds, true, "IoU threshold");
    validate_levels(a.tolerances, false, "tolerance");
    validate_levels(a.missing_tolerances, false, "tolerance");
    EvalConfig config;
    config.model = a.model;
    config.iou_thresholds = a.thresholds;
    config.hit_tolerances = a.tolerances;
    config.missing_tolerances = a.missing_tolerances;
    config.caption_threshold = a.caption_threshold;
    config.exclude_abstentions = a.exclude_abstentions;
    config.validate();
    const auto formats = formats_from(a.formats);
    for (const auto& tag : a.tasks) {
        const auto task = parse_task(tag);
        const bool per_video = task == Task::procedure_id || task == Task::dense_caption;
        if (per_video && a.annotations.empty()) throw InvalidArgument("--annotations is required for task '" + tag + "'");
        if (!per_video && a.manifest.empty()) throw InvalidArgument("--manifest is required for task '" + tag + "'");
    }

    std::vector<RawModelResponse> responses;
    for (const auto& d : a.dumps) {
        auto part = read_dump(d);
        responses.insert(responses.end(), part.begin(), part.end());
    }

    std::vector<AnnotationRecord> records;
    std::optional<DatasetManifest> manifest;
    MetricsReport report;
    for (const auto& tag : a.tasks) {
        const auto task = parse_task(tag);
        if (task == Task::procedure_id || task == Task::dense_caption) {
            if (records.empty()) records = parse_annotations(a.annotations);
        } else {
            if (!manifest) {
                manifest = read_manifest(a.manifest);
                report.meta["root_seed"] = std::to_string(manifest->header.root_seed);
                report.meta["rng"] = manifest->header.rng;
            }
        }
        switch (task) {
            case Task::procedure_id: add_to_report(report, evaluate_procedure_id(records, responses, config), config); break;
            case Task::dense_caption: add_to_report(report, evaluate_dense_caption(records, responses, config), config); break;
            case Task::missing_event: add_to_report(report, evaluate_missing_event(manifest->samples, responses, config), config); break;
            case Task::order_correction: add_to_report(report, evaluate_order_error(manifest->samples, responses, config), config); break;
        }
    }
    for (auto f : formats) {
        for (const auto& p : write_report(report, f, a.out)) {
            log_event(LogLevel::info, "report_written", {{"path", p.string()}});
        }
    }
    if (!report.failures.empty()) {
        log_event(LogLevel::warn, "scored_failures", {{"count", std::to_string(report.failures.size())}});
    }
    return kOk;
}

// --- report -----------------------------------------------------------------

struct ReportArgs {
    std::vector<std::string> inputs;
    std::string sort_by;
    std::vector<std::string> formats{"markdown"};
    std::string out;
};

int cmd_report(const ReportArgs& a) {
    const auto formats = formats_from(a.formats);
    MetricsReport merged;
    for (const auto& in : a.inputs) {
        std::string text;
        {
            std::FILE* f = std::fopen(in.c_str(), "rb");
            if (f == nullptr) throw InputError("cannot open " + in);
            char buf[65536];
            for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, f)) > 0;) text.append(buf, n);
            std::fclose(f);
        }
        merge_reports(merged, parse_structured_report(text, in));
    }
    if (!a.sort_by.empty()) sort_rows(merged, a.sort_by);
    for (auto f : formats) {
        for (const auto& p : write_report(merged, f, a.out)) {
            log_event(LogLevel::info, "report_written", {{"path", p.string()}});
        }
    }
    return kOk;
}

const char* kExitCodes =
    "Exit codes: 0 success, 1 internal error, 2 usage error, 3 input error (missing or invalid file),\n"
    "4 parse failure (unreadable response dump or report), 5 network failure (requests failed after retries).";

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Procedural-video dataset synthesis and evaluation toolkit"};
    app.footer(kExitCodes);
    app.require_subcommand(1);
    std::string level = "info";
    app.add_option("--log-level", level, "debug, info, warn, error or quiet")->capture_default_str();

    StoryboardArgs sb;
    auto* s = app.add_subcommand("storyboard", "Compose a frame directory into one timestamped storyboard image");
    s->add_option("--frames", sb.frames, "Directory of frame_%06d.png files")->required();
    s->add_option("--out", sb.out, "Output PNG")->required();
    s->add_option("--sidecar", sb.sidecar, "Tile sidecar JSON (default: next to --out)");
    s->add_option("--fps", sb.fps, "Sampling rate of the frames")->capture_default_str();
    s->add_option("--max-width", sb.max_width, "Wrap rows beyond this width")->capture_default_str();
    s->add_flag("--no-overlay", sb.no_overlay, "Do not burn timestamps in");

    PerturbArgs pa;
    auto* p = app.add_subcommand("perturb", "Synthesize masked / swapped / shifted / pass-through samples");
    p->add_option("--annotations", pa.annotations, "Annotation file")->required();
    p->add_option("--frames-root", pa.frames_root, "Root holding one frame directory per video id");
    p->add_option("--kinds", pa.kinds, "mask, swap, shift, keep")->delimiter(',')->capture_default_str();
    p->add_option("--counts", pa.counts, "Samples per kind (default: one per video)")->delimiter(',');
    p->add_option("--seed", pa.seed, "Root seed")->capture_default_str();
    p->add_option("--fps", pa.fps, "Frame rate of the frame directories")->capture_default_str();
    p->add_option("--out", pa.out, "Output directory")->required();
    p->add_flag("--storyboards", pa.storyboards, "Also compose a storyboard per sample");
    p->add_flag("--no-overlay", pa.no_overlay, "Storyboards without timestamps");
    p->add_option("--jobs", pa.jobs, "Worker threads for frame output (default: all cores)");

    InferArgs ia;
    auto* i = app.add_subcommand("infer", "Query a chat-completions endpoint and append raw answers to a dump");
    i->add_option("--task", ia.task, "procedure_id, dense_caption, missing_event or order_correction")->required();
    i->add_option("--annotations", ia.annotations, "Annotation file (video-level tasks)");
    i->add_option("--manifest", ia.manifest, "Dataset manifest (sample-level tasks)");
    i->add_option("--storyboards", ia.storyboards, "Directory of <item>.png storyboards to attach");
    i->add_option("--prompts", ia.prompts, "JSON file overriding prompt templates");
    i->add_option("--out", ia.out, "Response dump (JSON Lines, appended)");
    i->add_option("--backend", ia.backend, "openai, or oracle for ground-truth answers")->capture_default_str();
    i->add_flag("--dry-run", ia.dry_run, "Print rendered prompts and stop");
    i->add_flag("--fresh", ia.fresh, "Discard an existing dump instead of resuming");
    i->add_option("--base-url", ia.base_url, "Endpoint base URL (env PROCASSESS_BASE_URL)");
    i->add_option("--model", ia.model, "Model name");
    i->add_option("--timeout", ia.timeout, "Request timeout in seconds");
    i->add_option("--max-parallel", ia.max_parallel, "Requests in flight");
    i->add_option("--max-retries", ia.max_retries, "Retries on 429, 5xx and timeouts");
    i->add_option("--backoff-base", ia.backoff_base, "First retry delay in seconds");
    i->add_option("--jitter-seed", ia.jitter_seed, "Seed of the backoff jitter");

    EvaluateArgs ea;
    auto* e = app.add_subcommand("evaluate", "Score a response dump and write report tables");
    e->add_option("--task", ea.tasks, "Task(s) to score")->required()->delimiter(',');
    e->add_option("--annotations", ea.annotations, "Annotation file (video-level tasks)");
    e->add_option("--manifest", ea.manifest, "Dataset manifest (sample-level tasks)");
    e->add_option("--dump,--predictions", ea.dumps, "Response dump(s)")->required();
    e->add_option("--out", ea.out, "Report directory")->required();
    e->add_option("--format", ea.formats, "csv, markdown, json or all")->delimiter(',')->capture_default_str();
    e->add_option("--thresholds", ea.thresholds, "IoU thresholds")->delimiter(',')->capture_default_str();
    e->add_option("--tolerances", ea.tolerances, "Hit tolerances in seconds")->delimiter(',')->capture_default_str();
    e->add_option("--missing-tolerances", ea.missing_tolerances, "Hit tolerances of the missing-event task")
        ->delimiter(',')->capture_default_str();
    e->add_option("--caption-threshold", ea.caption_threshold, "IoU of caption-scored pairs")->capture_default_str();
    e->add_option("--model", ea.model, "Row label")->capture_default_str();
    e->add_flag("--exclude-abstentions", ea.exclude_abstentions, "Drop abstentions from hit denominators");

    ReportArgs ra;
    auto* r = app.add_subcommand("report", "Merge structured reports and re-render them");
    r->add_option("--input", ra.inputs, "report.json file(s)")->required();
    r->add_option("--sort-by", ra.sort_by, "Column to sort rows by, ascending");
    r->add_option("--format", ra.formats, "csv, markdown, json or all")->delimiter(',')->capture_default_str();
    r->add_option("--out", ra.out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        set_log_level(parse_log_level(level));
        if (*s) return cmd_storyboard(sb);
        if (*p) return cmd_perturb(pa);
        if (*i) return cmd_infer(ia);
        if (*e) return cmd_evaluate(ea);
        if (*r) return cmd_report(ra);
    } catch (const InvalidArgument& err) {
        log_event(LogLevel::error, "usage_error", {{"message", err.what()}});
        return kUsage;
    } catch (const InputError& err) {
        log_event(LogLevel::error, "input_error", {{"message", err.what()}});
        return kInputError;
    } catch (const ParseError& err) {
        log_event(LogLevel::error, "parse_failure", {{"message", err.what()}});
        return kParseFailure;
    } catch (const NetworkError& err) {
        log_event(LogLevel::error, "network_failure", {{"message", err.what()}});
        return kNetworkFailure;
    } catch (const std::exception& err) {
        log_event(LogLevel::error, "internal_error", {{"message", err.what()}});
        return kInternal;
    }
    return kInternal;
}
