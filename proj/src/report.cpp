#include "procassess/report.hpp"

#include "io_util.hpp"
#include "procassess/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace procassess {

using nlohmann::ordered_json;

namespace {

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

std::string md_cell(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (c == '|') out += "\\|";
        else if (c == '\n' || c == '\r') out += ' ';
        else out += c;
    }
    return out;
}

std::string file_stem(ReportBlockKind kind) { return std::string(to_string(kind)); }

std::string render_csv_block(const ReportBlock& block) {
    std::string out = "Model";
    for (const auto& c : block.columns) out += "," + csv_field(c.name);
    out += "\r\n";
    for (const auto& row : block.rows) {
        out += csv_field(row.model);
        for (std::size_t i = 0; i < block.columns.size(); ++i) {
            out += "," + detail::format_fixed(row.values[i], block.columns[i].decimals);
        }
        out += "\r\n";
    }
    return out;
}

std::string render_markdown(const MetricsReport& report) {
    std::string out = "# Evaluation report\n";
    if (!report.meta.empty()) {
        out += "\n";
        for (const auto& [k, v] : report.meta) out += "- " + md_cell(k) + ": " + md_cell(v) + "\n";
    }
    for (const auto& block : report.blocks) {
        out += "\n## " + md_cell(block.title) + "\n\n| Model |";
        for (const auto& c : block.columns) out += " " + md_cell(c.name) + " |";
        out += "\n|---|";
        for (std::size_t i = 0; i < block.columns.size(); ++i) out += "---:|";
        out += "\n";
        for (const auto& row : block.rows) {
            out += "| " + md_cell(row.model) + " |";
            for (std::size_t i = 0; i < block.columns.size(); ++i) {
                out += " " + detail::format_fixed(row.values[i], block.columns[i].decimals) + " |";
            }
            out += "\n";
        }
    }
    if (!report.failures.empty()) {
        out += "\n## Parse failures\n\n| Task | Request | Reason |\n|---|---|---|\n";
        for (const auto& f : report.failures) {
            out += "| " + md_cell(f.task) + " | " + md_cell(f.request_id) + " | " + md_cell(f.reason) + " |\n";
        }
    }
    return out;
}

std::string render_structured(const MetricsReport& report) {
    ordered_json doc;
    doc["schema"] = "procassess.report";
    doc["schema_version"] = 1;
    doc["meta"] = ordered_json::object();
    for (const auto& [k, v] : report.meta) doc["meta"][k] = v;
    auto& blocks = doc["blocks"] = ordered_json::array();
    for (const auto& block : report.blocks) {
        ordered_json b;
        b["kind"] = to_string(block.kind);
        b["title"] = block.title;
        auto& cols = b["columns"] = ordered_json::array();
        for (const auto& c : block.columns) {
            cols.push_back({{"name", c.name}, {"decimals", c.decimals}, {"max", c.max_value}});
        }
        auto& rows = b["rows"] = ordered_json::array();
        for (const auto& row : block.rows) {
            ordered_json r;
            r["model"] = row.model;
            r["values"] = row.values;
            r["details"] = ordered_json::object();
            for (const auto& [k, v] : row.details) r["details"][k] = v;
            rows.push_back(std::move(r));
        }
        blocks.push_back(std::move(b));
    }
    auto& failures = doc["failures"] = ordered_json::array();
    for (const auto& f : report.failures) {
        failures.push_back({{"task", f.task}, {"request_id", f.request_id}, {"reason", f.reason}});
    }
    return doc.dump(2, ' ', false, ordered_json::error_handler_t::replace) + "\n";
}

bool same_layout(const ReportBlock& a, const ReportBlock& b) {
    if (a.kind != b.kind || a.columns.size() != b.columns.size()) return false;
    for (std::size_t i = 0; i < a.columns.size(); ++i) {
        if (a.columns[i].name != b.columns[i].name) return false;
    }
    return true;
}

}  // namespace

std::string_view to_string(ReportBlockKind kind) noexcept {
    switch (kind) {
        case ReportBlockKind::procedure_accuracy: return "procedure_accuracy";
        case ReportBlockKind::coarse_segmentation: return "coarse_segmentation";
        case ReportBlockKind::dense_caption: return "dense_caption";
        case ReportBlockKind::missing_event: return "missing_event";
        case ReportBlockKind::order_error: return "order_error";
    }
    return "dense_caption";
}

ReportBlockKind parse_report_block_kind(std::string_view name) {
    for (auto k : {ReportBlockKind::procedure_accuracy, ReportBlockKind::coarse_segmentation,
                   ReportBlockKind::dense_caption, ReportBlockKind::missing_event,
                   ReportBlockKind::order_error}) {
        if (to_string(k) == name) return k;
    }
    throw InvalidArgument("unknown report block '" + std::string(name) + "'");
}

ReportFormat parse_report_format(std::string_view name) {
    if (name == "csv") return ReportFormat::csv;
    if (name == "markdown" || name == "md") return ReportFormat::markdown;
    if (name == "structured" || name == "json") return ReportFormat::structured;
    throw InvalidArgument("unknown report format '" + std::string(name) + "'");
}

std::string format_level(double value) {
    std::string s = detail::format_fixed(value, 3);
    while (s.size() > 1 && s.back() == '0' && s[s.size() - 2] != '.') s.pop_back();
    return s;
}

std::vector<ReportColumn> dense_caption_columns(std::span<const double> thresholds) {
    std::vector<ReportColumn> cols;
    for (double t : thresholds) {
        const auto at = "@" + format_level(t);
        cols.push_back({"P" + at});
        cols.push_back({"R" + at});
        cols.push_back({"F1" + at});
    }
    cols.push_back({"RougeL"});
    cols.push_back({"TokenF1"});
    return cols;
}

std::vector<ReportColumn> coarse_segmentation_columns(std::span<const double> thresholds) {
    std::vector<ReportColumn> cols;
    for (double t : thresholds) cols.push_back({"F1@" + format_level(t)});
    cols.push_back({"Avg. Cov."});
    cols.push_back({"Avg. Hit"});
    return cols;
}

std::vector<ReportColumn> procedure_accuracy_columns() {
    return {{"Top-1 Accuracy(%)", 1, 100.0}};
}

std::vector<ReportColumn> missing_event_columns(std::span<const double> tolerances) {
    std::vector<ReportColumn> cols{{"P"}, {"R"}, {"F1"}};
    for (double t : tolerances) cols.push_back({"Hit@" + format_level(t) + "s"});
    return cols;
}

std::vector<ReportColumn> order_error_columns(std::span<const double> tolerances) {
    std::vector<ReportColumn> cols;
    for (double t : tolerances) cols.push_back({"Hit@" + format_level(t) + "s", 4});
    return cols;
}

void validate_report(const MetricsReport& report) {
    for (const auto& block : report.blocks) {
        for (const auto& row : block.rows) {
            if (row.values.size() != block.columns.size()) {
                throw InvalidArgument("report block '" + block.title + "' row '" + row.model +
                                      "' has " + std::to_string(row.values.size()) + " values for " +
                                      std::to_string(block.columns.size()) + " columns");
            }
            for (std::size_t i = 0; i < row.values.size(); ++i) {
                const double v = row.values[i];
                if (!std::isfinite(v) || v < 0.0 || v > block.columns[i].max_value + 1e-12) {
                    throw InvalidArgument("report block '" + block.title + "' row '" + row.model +
                                          "' column '" + block.columns[i].name + "' is out of range");
                }
            }
        }
    }
}

void sort_rows(MetricsReport& report, std::string_view column) {
    bool found = false;
    for (auto& block : report.blocks) {
        const auto it = std::find_if(block.columns.begin(), block.columns.end(),
                                     [&](const auto& c) { return c.name == column; });
        if (it == block.columns.end()) continue;
        found = true;
        const auto idx = static_cast<std::size_t>(it - block.columns.begin());
        std::stable_sort(block.rows.begin(), block.rows.end(), [&](const auto& a, const auto& b) {
            if (a.values[idx] != b.values[idx]) return a.values[idx] < b.values[idx];
            return a.model < b.model;
        });
    }
    if (!found) throw InvalidArgument("no report block has a column named '" + std::string(column) + "'");
}

void merge_reports(MetricsReport& into, const MetricsReport& other) {
    for (const auto& block : other.blocks) {
        auto it = std::find_if(into.blocks.begin(), into.blocks.end(),
                               [&](const auto& b) { return same_layout(b, block); });
        if (it == into.blocks.end()) {
            into.blocks.push_back(block);
        } else {
            it->rows.insert(it->rows.end(), block.rows.begin(), block.rows.end());
        }
    }
    into.failures.insert(into.failures.end(), other.failures.begin(), other.failures.end());
    for (const auto& [k, v] : other.meta) into.meta.emplace(k, v);
}

std::map<std::string, std::string> render_report(const MetricsReport& report, ReportFormat format) {
    validate_report(report);
    std::map<std::string, std::string> files;
    switch (format) {
        case ReportFormat::csv: {
            for (const auto& block : report.blocks) {
                auto name = file_stem(block.kind) + ".csv";
                for (int n = 2; files.count(name); ++n) name = file_stem(block.kind) + "_" + std::to_string(n) + ".csv";
                files[name] = render_csv_block(block);
            }
            std::string failures = "Task,Request,Reason\r\n";
            for (const auto& f : report.failures) {
                failures += csv_field(f.task) + "," + csv_field(f.request_id) + "," + csv_field(f.reason) + "\r\n";
            }
            files["failures.csv"] = failures;
            break;
        }
        case ReportFormat::markdown: files["report.md"] = render_markdown(report); break;
        case ReportFormat::structured: files["report.json"] = render_structured(report); break;
    }
    return files;
}

std::vector<std::filesystem::path> write_report(const MetricsReport& report, ReportFormat format,
                                                const std::filesystem::path& output_dir) {
    const auto files = render_report(report, format);
    std::error_code ec;
    std::filesystem::create_directories(output_dir, ec);
    if (ec) throw InputError("cannot create " + output_dir.string() + ": " + ec.message());
    std::vector<std::filesystem::path> written;
    for (const auto& [name, contents] : files) {
        detail::write_file(output_dir / name, contents);
        written.push_back(output_dir / name);
    }
    return written;
}

MetricsReport parse_structured_report(std::string_view text, std::string_view source) {
    const std::string where(source);
    auto doc = ordered_json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || doc.value("schema", "") != "procassess.report" ||
        doc.value("schema_version", 0) != 1) {
        throw ParseError(where + ": not a procassess.report v1 document");
    }
    MetricsReport report;
    try {
        for (auto it = doc["meta"].begin(); it != doc["meta"].end(); ++it) {
            report.meta[it.key()] = it.value().get<std::string>();
        }
        for (const auto& b : doc.at("blocks")) {
            ReportBlock block;
            block.kind = parse_report_block_kind(b.at("kind").get<std::string>());
            block.title = b.at("title").get<std::string>();
            for (const auto& c : b.at("columns")) {
                block.columns.push_back({c.at("name").get<std::string>(), c.at("decimals").get<int>(),
                                         c.at("max").get<double>()});
            }
            for (const auto& r : b.at("rows")) {
                ReportRow row;
                row.model = r.at("model").get<std::string>();
                row.values = r.at("values").get<std::vector<double>>();
                for (auto d = r.at("details").begin(); d != r.at("details").end(); ++d) {
                    row.details[d.key()] = d.value().get<double>();
                }
                block.rows.push_back(std::move(row));
            }
            report.blocks.push_back(std::move(block));
        }
        for (const auto& f : doc.at("failures")) {
            report.failures.push_back({f.at("task").get<std::string>(), f.at("request_id").get<std::string>(),
                                       f.at("reason").get<std::string>()});
        }
    } catch (const ordered_json::exception& e) {
        throw ParseError(where + ": " + e.what());
    } catch (const InvalidArgument& e) {
        throw ParseError(where + ": " + e.what());
    }
    validate_report(report);
    return report;
}

}  // namespace procassess
