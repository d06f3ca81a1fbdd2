#include "procassess/responses.hpp"

#include "io_util.hpp"
#include "procassess/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <initializer_list>
#include <numeric>
#include <sstream>

namespace procassess {

using nlohmann::json;

namespace {

constexpr std::size_t kMaxLineLength = 4096;
constexpr std::size_t kMaxJsonCandidates = 64;
constexpr int kMaxJsonDepth = 64;

// ---------- small text helpers ----------

bool is_space(unsigned char c) { return std::isspace(c) != 0; }
bool is_alpha(unsigned char c) { return std::isalpha(c) != 0; }
bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && is_space(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

void skip_spaces(std::string_view s, std::size_t& pos) {
    while (pos < s.size() && is_space(static_cast<unsigned char>(s[pos]))) ++pos;
}

bool starts_with_at(std::string_view s, std::size_t pos, std::string_view prefix) {
    return s.substr(pos, prefix.size()) == prefix;
}

bool word_boundary(std::string_view s, std::size_t pos) {
    return pos >= s.size() || !std::isalnum(static_cast<unsigned char>(s[pos]));
}

// Position of `phrase` in lowercase `text` with word boundaries on both sides.
std::size_t find_phrase(std::string_view text, std::string_view phrase, std::size_t from = 0) {
    while (true) {
        const auto pos = text.find(phrase, from);
        if (pos == std::string_view::npos) return pos;
        const bool left = pos == 0 || !std::isalnum(static_cast<unsigned char>(text[pos - 1]));
        if (left && word_boundary(text, pos + phrase.size())) return pos;
        from = pos + 1;
    }
}

bool contains_any(std::string_view text, std::initializer_list<std::string_view> phrases) {
    return std::any_of(phrases.begin(), phrases.end(),
                       [&](auto p) { return find_phrase(text, p) != std::string_view::npos; });
}

std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto nl = text.find('\n', start);
        const auto end = nl == std::string_view::npos ? text.size() : nl;
        std::string line(text.substr(start, end - start));
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
        if (nl == std::string_view::npos) break;
        start = nl + 1;
    }
    return lines;
}

std::optional<double> parse_decimal(std::string_view s) {
    if (s.empty()) return std::nullopt;
    for (char c : s) {
        if (!is_digit(static_cast<unsigned char>(c)) && c != '.') return std::nullopt;
    }
    if (std::count(s.begin(), s.end(), '.') > 1 || s.front() == '.' || s.back() == '.') {
        return std::nullopt;
    }
    double value = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

// ---------- time tokens and the line grammar ----------

// Scans digits with [:.]digit groups and an optional seconds suffix.
std::optional<std::string_view> scan_time_token(std::string_view s, std::size_t& pos) {
    const std::size_t begin = pos;
    if (pos >= s.size() || !is_digit(static_cast<unsigned char>(s[pos]))) return std::nullopt;
    while (pos < s.size() && is_digit(static_cast<unsigned char>(s[pos]))) ++pos;
    while (pos + 1 < s.size() && (s[pos] == ':' || s[pos] == '.') &&
           is_digit(static_cast<unsigned char>(s[pos + 1]))) {
        ++pos;
        while (pos < s.size() && is_digit(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    const std::size_t number_end = pos;
    std::size_t look = pos;
    skip_spaces(s, look);
    for (std::string_view suffix : {"seconds", "second", "secs", "sec", "s"}) {
        if (starts_with_at(s, look, suffix) &&
            (look + suffix.size() >= s.size() || !is_alpha(static_cast<unsigned char>(s[look + suffix.size()])))) {
            pos = look + suffix.size();
            break;
        }
    }
    return s.substr(begin, number_end - begin);
}

bool scan_separator(std::string_view s, std::size_t& pos) {
    for (std::string_view sep : {"-", "\xE2\x80\x93", "\xE2\x80\x94", "~"}) {
        if (starts_with_at(s, pos, sep)) {
            pos += sep.size();
            return true;
        }
    }
    if (starts_with_at(s, pos, "to") && (pos + 2 >= s.size() || !is_alpha(static_cast<unsigned char>(s[pos + 2])))) {
        pos += 2;
        return true;
    }
    return false;
}

// "<start> <sep> <end>" at `pos`; advances past it on success.
std::optional<TimeInterval> scan_time_range(std::string_view s, std::size_t& pos) {
    std::size_t p = pos;
    const auto first = scan_time_token(s, p);
    if (!first) return std::nullopt;
    skip_spaces(s, p);
    if (!scan_separator(s, p)) return std::nullopt;
    skip_spaces(s, p);
    const auto second = scan_time_token(s, p);
    if (!second) return std::nullopt;
    const auto a = parse_time(*first);
    const auto b = parse_time(*second);
    if (!a || !b) return std::nullopt;
    try {
        TimeInterval iv(*a, *b);
        pos = p;
        return iv;
    } catch (const InvalidArgument&) {
        return std::nullopt;
    }
}

void strip_list_marker(std::string_view s, std::size_t& pos) {
    for (std::string_view bullet : {"-", "*", "\xE2\x80\xA2"}) {
        if (starts_with_at(s, pos, bullet) && pos + bullet.size() < s.size() &&
            is_space(static_cast<unsigned char>(s[pos + bullet.size()]))) {
            pos += bullet.size();
            skip_spaces(s, pos);
            return;
        }
    }
    std::size_t p = pos;
    while (p < s.size() && is_digit(static_cast<unsigned char>(s[p]))) ++p;
    if (p > pos && p + 1 < s.size() && (s[p] == '.' || s[p] == ')') &&
        is_space(static_cast<unsigned char>(s[p + 1]))) {
        pos = p + 1;
        skip_spaces(s, pos);
    }
}

std::optional<ActionSegment> parse_segment_line(std::string_view line) {
    std::size_t pos = 0;
    skip_spaces(line, pos);
    strip_list_marker(line, pos);
    bool bracketed = false;
    if (pos < line.size() && (line[pos] == '[' || line[pos] == '(')) {
        bracketed = true;
        ++pos;
        skip_spaces(line, pos);
    }
    const auto interval = scan_time_range(line, pos);
    if (!interval) return std::nullopt;
    skip_spaces(line, pos);
    bool closed = false;
    if (bracketed && pos < line.size() && (line[pos] == ']' || line[pos] == ')')) {
        closed = true;
        ++pos;
        skip_spaces(line, pos);
    }
    if (bracketed && !closed) return std::nullopt;
    bool delimited = false;
    for (std::string_view delim : {":", "\xEF\xBC\x9A", "|"}) {
        if (starts_with_at(line, pos, delim)) {
            pos += delim.size();
            delimited = true;
            break;
        }
    }
    if (!delimited && !closed) return std::nullopt;
    const auto caption = trim(line.substr(pos));
    if (caption.empty()) return std::nullopt;
    try {
        return ActionSegment(*interval, std::string(caption));
    } catch (const InvalidArgument&) {
        return std::nullopt;
    }
}

bool is_ignorable_line(std::string_view line) {
    const auto t = trim(line);
    if (t.empty() || t.substr(0, 3) == "```") return true;
    const auto l = lower(t.substr(0, 32));
    for (std::string_view key : {"procedure:", "procedure name:", "procedure label:"}) {
        if (l.rfind(key, 0) == 0) return true;
    }
    return false;
}

// ---------- embedded JSON ----------

// End (exclusive) of the bracketed value opening at `open`, or npos.
std::size_t matching_close(std::string_view s, std::size_t open) {
    std::vector<char> stack;
    bool in_string = false, escaped = false;
    for (std::size_t i = open; i < s.size(); ++i) {
        const char c = s[i];
        if (in_string) {
            if (escaped) escaped = false;
            else if (c == '\\') escaped = true;
            else if (c == '"') in_string = false;
            continue;
        }
        if (c == '"') in_string = true;
        else if (c == '{' || c == '[') {
            stack.push_back(c == '{' ? '}' : ']');
            if (static_cast<int>(stack.size()) > kMaxJsonDepth) return std::string_view::npos;
        } else if (c == '}' || c == ']') {
            if (stack.empty() || stack.back() != c) return std::string_view::npos;
            stack.pop_back();
            if (stack.empty()) return i + 1;
        }
    }
    return std::string_view::npos;
}

// Every well-formed JSON object/array embedded in `text`, outermost first.
std::vector<json> embedded_json(std::string_view text) {
    std::vector<json> out;
    std::size_t candidates = 0;
    std::size_t pos = 0;
    while (pos < text.size() && candidates < kMaxJsonCandidates) {
        const auto open = text.find_first_of("{[", pos);
        if (open == std::string_view::npos) break;
        ++candidates;
        const auto close = matching_close(text, open);
        if (close == std::string_view::npos) {
            pos = open + 1;
            continue;
        }
        auto parsed = json::parse(text.substr(open, close - open), nullptr, false);
        if (!parsed.is_discarded() && (parsed.is_object() || parsed.is_array())) {
            out.push_back(std::move(parsed));
            pos = close;
        } else {
            pos = open + 1;
        }
    }
    return out;
}

const json* find_key(const json& obj, std::initializer_list<std::string_view> keys) {
    if (!obj.is_object()) return nullptr;
    for (auto key : keys) {
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            if (lower(it.key()) == key && !it.value().is_null()) return &it.value();
        }
    }
    return nullptr;
}

std::optional<double> json_time(const json* value) {
    if (value == nullptr) return std::nullopt;
    if (value->is_number()) return value->get<double>();
    if (value->is_string()) return parse_time(value->get<std::string>());
    return std::nullopt;
}

std::optional<std::string> json_text(const json* value) {
    if (value == nullptr || !value->is_string()) return std::nullopt;
    const auto t = trim(value->get_ref<const std::string&>());
    if (t.empty()) return std::nullopt;
    return std::string(t);
}

std::optional<bool> word_to_bool(std::string_view word) {
    const auto w = lower(trim(word));
    if (w == "true" || w == "yes" || w == "correct" || w == "y" || w == "1") return true;
    if (w == "false" || w == "no" || w == "incorrect" || w == "n" || w == "0") return false;
    return std::nullopt;
}

std::optional<bool> json_bool(const json* value) {
    if (value == nullptr) return std::nullopt;
    if (value->is_boolean()) return value->get<bool>();
    if (value->is_number_integer()) {
        const auto v = value->get<long long>();
        if (v == 0 || v == 1) return v == 1;
    }
    if (value->is_string()) return word_to_bool(value->get<std::string>());
    return std::nullopt;
}

std::optional<TimeInterval> json_interval(const json& obj) {
    std::optional<double> start, end;
    if (const auto* pair = find_key(obj, {"interval", "time", "timestamps", "span", "predicted_interval"})) {
        if (pair->is_array() && pair->size() == 2) {
            start = json_time(&(*pair)[0]);
            end = json_time(&(*pair)[1]);
        } else if (pair->is_string()) {
            const std::string s = pair->get<std::string>();
            std::size_t pos = 0;
            skip_spaces(s, pos);
            return scan_time_range(s, pos);
        } else if (pair->is_object()) {
            return json_interval(*pair);
        }
    }
    if (!start) start = json_time(find_key(obj, {"start", "start_time", "begin", "from", "start_sec", "start_s"}));
    if (!end) end = json_time(find_key(obj, {"end", "end_time", "finish", "to", "stop", "end_sec", "end_s"}));
    if (!start || !end) return std::nullopt;
    try {
        return TimeInterval(*start, *end);
    } catch (const InvalidArgument&) {
        return std::nullopt;
    }
}

const json* segment_array(const json& doc) {
    if (doc.is_array()) return &doc;
    if (const auto* arr = find_key(doc, {"segments", "actions", "events", "steps", "action_segments"})) {
        if (arr->is_array()) return arr;
    }
    return nullptr;
}

std::optional<std::size_t> json_index(const json& v) {
    if (v.is_number_unsigned()) return v.get<std::size_t>();
    if (v.is_number_integer() && v.get<long long>() >= 0) return static_cast<std::size_t>(v.get<long long>());
    if (v.is_string()) {
        const auto t = trim(v.get_ref<const std::string&>());
        std::size_t out = 0;
        const auto res = std::from_chars(t.data(), t.data() + t.size(), out);
        if (res.ec == std::errc() && res.ptr == t.data() + t.size() && !t.empty()) return out;
    }
    return std::nullopt;
}

// ---------- text-form verdict helpers ----------

// List of integers after "<key> :" / "<key> =" in lowercase `text`.
std::optional<std::vector<std::size_t>> keyed_index_list(const std::string& text,
                                                         std::initializer_list<std::string_view> keys) {
    for (auto key : keys) {
        std::size_t from = 0;
        while (true) {
            const auto at = find_phrase(text, key, from);
            if (at == std::string::npos) break;
            std::size_t pos = at + key.size();
            while (pos < text.size() && text[pos] != ':' && text[pos] != '=' && text[pos] != '\n' &&
                   pos - at < key.size() + 24) {
                ++pos;
            }
            if (pos < text.size() && (text[pos] == ':' || text[pos] == '=')) {
                ++pos;
                skip_spaces(text, pos);
                if (pos < text.size() && (text[pos] == '[' || text[pos] == '(')) ++pos;
                std::vector<std::size_t> values;
                bool any = false;
                while (pos < text.size()) {
                    skip_spaces(text, pos);
                    std::size_t n = 0;
                    const auto res = std::from_chars(text.data() + pos, text.data() + text.size(), n);
                    if (res.ec != std::errc()) break;
                    any = true;
                    values.push_back(n);
                    pos = static_cast<std::size_t>(res.ptr - text.data());
                    skip_spaces(text, pos);
                    if (pos < text.size() && (text[pos] == ',' || text[pos] == ';')) {
                        ++pos;
                        continue;
                    }
                    break;
                }
                const auto rest = trim(std::string_view(text).substr(pos, 8));
                const bool none = !any && (rest.rfind("none", 0) == 0 || rest.rfind("]", 0) == 0);
                if (any || none) return values;
            }
            from = at + 1;
        }
    }
    return std::nullopt;
}

std::optional<std::string> keyed_word(const std::string& text, std::initializer_list<std::string_view> keys) {
    for (auto key : keys) {
        std::size_t from = 0;
        while (true) {
            const auto at = find_phrase(text, key, from);
            if (at == std::string::npos) break;
            std::size_t pos = at + key.size();
            if (pos < text.size() && text[pos] == '"') ++pos;
            skip_spaces(text, pos);
            if (pos < text.size() && (text[pos] == ':' || text[pos] == '=')) {
                ++pos;
                skip_spaces(text, pos);
                if (pos < text.size() && text[pos] == '"') ++pos;
                const std::size_t begin = pos;
                while (pos < text.size() && std::isalnum(static_cast<unsigned char>(text[pos]))) ++pos;
                // Empty result: the key is there but its value is not a word.
                return text.substr(begin, pos - begin);
            }
            from = at + 1;
        }
    }
    return std::nullopt;
}

std::string keyed_line(std::string_view original, std::initializer_list<std::string_view> keys) {
    for (const auto& line : split_lines(original)) {
        const auto l = lower(line);
        for (auto key : keys) {
            std::size_t pos = 0;
            skip_spaces(l, pos);
            if (l.compare(pos, key.size(), key) != 0) continue;
            pos += key.size();
            skip_spaces(l, pos);
            if (pos < l.size() && (l[pos] == ':' || l[pos] == '=')) {
                return std::string(trim(std::string_view(line).substr(pos + 1)));
            }
        }
    }
    return {};
}

std::vector<std::size_t> identity(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), std::size_t{0});
    return v;
}

bool valid_permutation(const std::vector<std::size_t>& order, std::size_t n) {
    if (order.size() != n) return false;
    std::vector<bool> seen(n, false);
    for (auto v : order) {
        if (v >= n || seen[v]) return false;
        seen[v] = true;
    }
    return true;
}

void finish_order(OrderParse& parse, std::size_t segment_count) {
    auto& v = *parse.verdict;
    std::sort(v.misplaced.begin(), v.misplaced.end());
    v.misplaced.erase(std::unique(v.misplaced.begin(), v.misplaced.end()), v.misplaced.end());
    if (v.corrected_order && segment_count > 0 && !valid_permutation(*v.corrected_order, segment_count)) {
        v.corrected_order.reset();
        parse.note = "corrected order is not a permutation of " + std::to_string(segment_count) + " segments";
    }
    if (v.is_correct) {
        v.misplaced.clear();
        v.misplaced_intervals.clear();
        if (!v.corrected_order) v.corrected_order = identity(segment_count);
    }
}

std::optional<OrderVerdict> structured_order(const json& doc) {
    const json* obj = &doc;
    if (doc.is_object()) {
        if (const auto* inner = find_key(doc, {"verdict", "result", "answer"}); inner && inner->is_object()) {
            obj = inner;
        }
    }
    if (!obj->is_object()) return std::nullopt;
    OrderVerdict v;
    const auto correct = json_bool(find_key(*obj, {"is_correct", "correct", "sequence_correct", "in_order", "is_in_order", "order_correct"}));
    bool have_misplaced = false;
    if (const auto* mis = find_key(*obj, {"misplaced", "misplaced_indices", "misplaced_segments", "errors", "misplaced_steps"})) {
        if (mis->is_array()) {
            have_misplaced = true;
            for (const auto& item : *mis) {
                if (auto idx = json_index(item)) {
                    v.misplaced.push_back(*idx);
                } else if (item.is_object()) {
                    if (const auto* k = find_key(item, {"index", "position", "segment", "id"})) {
                        if (auto idx2 = json_index(*k)) v.misplaced.push_back(*idx2);
                    }
                    if (auto iv = json_interval(item)) v.misplaced_intervals.push_back(*iv);
                }
            }
        }
    }
    if (correct) {
        v.is_correct = *correct;
    } else if (have_misplaced) {
        v.is_correct = v.misplaced.empty() && v.misplaced_intervals.empty();
    } else {
        return std::nullopt;
    }
    if (const auto* order = find_key(*obj, {"corrected_order", "correct_order", "reconstructed_order", "order"})) {
        if (order->is_array()) {
            std::vector<std::size_t> o;
            bool ok = true;
            for (const auto& item : *order) {
                auto idx = json_index(item);
                if (!idx) { ok = false; break; }
                o.push_back(*idx);
            }
            if (ok) v.corrected_order = std::move(o);
        }
    }
    if (auto r = json_text(find_key(*obj, {"reasoning", "rationale", "explanation", "reason"}))) v.reasoning = *r;
    return v;
}

std::optional<MissingVerdict> structured_missing(const json& doc) {
    if (!doc.is_object()) return std::nullopt;
    const json* obj = &doc;
    if (const auto* inner = find_key(doc, {"verdict", "result", "answer", "missing_event"}); inner && inner->is_object()) {
        obj = inner;
    }
    MissingVerdict v;
    const auto flag = json_bool(find_key(*obj, {"has_missing", "missing", "is_missing", "incomplete", "has_missing_step", "missing_detected"}));
    v.predicted_caption = json_text(find_key(*obj, {"caption", "predicted_caption", "missing_caption", "description", "action", "missing_action", "missing_step"}));
    v.predicted_interval = json_interval(*obj);
    if (flag) v.has_missing = *flag;
    else if (v.predicted_caption) v.has_missing = true;
    else return std::nullopt;
    if (auto r = json_text(find_key(*obj, {"reasoning", "rationale", "explanation", "reason"}))) v.reasoning = *r;
    return v;
}

}  // namespace

std::string_view to_string(Task task) noexcept {
    switch (task) {
        case Task::procedure_id: return "procedure_id";
        case Task::dense_caption: return "dense_caption";
        case Task::missing_event: return "missing_event";
        case Task::order_correction: return "order_correction";
    }
    return "dense_caption";
}

Task parse_task(std::string_view tag) {
    if (tag == "procedure_id") return Task::procedure_id;
    if (tag == "dense_caption") return Task::dense_caption;
    if (tag == "missing_event") return Task::missing_event;
    if (tag == "order_correction") return Task::order_correction;
    throw InvalidArgument("unknown task '" + std::string(tag) + "'");
}

std::string make_request_id(Task task, std::string_view item) {
    return std::string(to_string(task)) + "/" + std::string(item);
}

std::optional<double> parse_time(std::string_view text) {
    auto t = trim(text);
    for (std::string_view suffix : {"seconds", "second", "secs", "sec", "s"}) {
        if (t.size() > suffix.size() && t.substr(t.size() - suffix.size()) == suffix) {
            t = trim(t.substr(0, t.size() - suffix.size()));
            break;
        }
    }
    if (t.empty()) return std::nullopt;
    if (t.find(':') == std::string_view::npos) return parse_decimal(t);

    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto colon = t.find(':', start);
        parts.push_back(t.substr(start, colon == std::string_view::npos ? std::string_view::npos : colon - start));
        if (colon == std::string_view::npos) break;
        start = colon + 1;
    }
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        if (parts[i].empty() || !std::all_of(parts[i].begin(), parts[i].end(), [](char c) { return is_digit(static_cast<unsigned char>(c)); })) {
            return std::nullopt;
        }
    }
    const auto last = parts.back();
    if (parts.size() == 2 && last.size() == 3 &&
        std::all_of(last.begin(), last.end(), [](char c) { return is_digit(static_cast<unsigned char>(c)); })) {
        // overlay form SS:mmm
        const auto ss = parse_decimal(parts[0]);
        const auto ms = parse_decimal(last);
        if (!ss || !ms) return std::nullopt;
        return *ss + *ms / 1000.0;
    }
    const auto seconds = parse_decimal(last);
    if (!seconds || last.size() < 2 || last[0] == '.' || (last.size() > 2 && last[2] != '.') || *seconds >= 60.0) {
        return std::nullopt;
    }
    if (parts.size() == 2) {
        return *parse_decimal(parts[0]) * 60.0 + *seconds;
    }
    if (parts.size() == 3) {
        if (parts[1].size() != 2) return std::nullopt;
        const double minutes = *parse_decimal(parts[1]);
        if (minutes >= 60.0) return std::nullopt;
        return *parse_decimal(parts[0]) * 3600.0 + minutes * 60.0 + *seconds;
    }
    return std::nullopt;
}

SegmentParse parse_segment_list(std::string_view text) noexcept {
    SegmentParse result;
    try {
        for (const auto& doc : embedded_json(text)) {
            const auto* arr = segment_array(doc);
            if (arr == nullptr) continue;
            SegmentParse structured;
            structured.structured = true;
            for (const auto& item : *arr) {
                std::optional<TimeInterval> iv;
                std::optional<std::string> caption;
                if (item.is_object()) {
                    iv = json_interval(item);
                    caption = json_text(find_key(item, {"caption", "description", "action", "text", "label", "step", "name"}));
                }
                if (iv && caption) {
                    structured.segments.emplace_back(*iv, *caption);
                } else {
                    ++structured.malformed_lines;
                }
            }
            if (!structured.segments.empty()) return structured;
        }

        for (const auto& line : split_lines(text)) {
            if (is_ignorable_line(line)) continue;
            if (line.size() > kMaxLineLength) {
                ++result.malformed_lines;
                continue;
            }
            if (auto seg = parse_segment_line(line)) {
                result.segments.push_back(std::move(*seg));
            } else {
                ++result.malformed_lines;
            }
        }
    } catch (...) {
        // Only allocation failure can land here; report what was gathered.
    }
    return result;
}

SegmentParse parse_segment_list(const RawModelResponse& response) {
    if (response.task != Task::dense_caption && response.task != Task::procedure_id) {
        throw InvalidArgument("segment lists come from procedure_id or dense_caption responses, not " +
                              std::string(to_string(response.task)));
    }
    if (!response.ok) return {};
    return parse_segment_list(response.text);
}

std::optional<std::string> parse_procedure_label(std::string_view text) noexcept {
    try {
        for (const auto& doc : embedded_json(text)) {
            if (auto label = json_text(find_key(doc, {"procedure", "procedure_label", "procedure_name", "label", "skill"}))) {
                return label;
            }
        }
        auto line = keyed_line(text, {"procedure label", "procedure name", "procedure", "skill"});
        while (!line.empty() && (line.back() == '.' || line.back() == '"')) line.pop_back();
        if (!line.empty() && line.front() == '"') line.erase(0, 1);
        const auto t = trim(line);
        if (!t.empty()) return std::string(t);
    } catch (...) {
    }
    return std::nullopt;
}

OrderParse parse_order_verdict(std::string_view text, std::size_t segment_count) noexcept {
    OrderParse parse;
    try {
        for (const auto& doc : embedded_json(text)) {
            if (auto v = structured_order(doc)) {
                parse.verdict = std::move(v);
                finish_order(parse, segment_count);
                return parse;
            }
        }
        if (text.size() > 64 * 1024) {
            parse.note = "response too long for the text rules";
            return parse;
        }
        const std::string l = lower(text);
        std::optional<bool> correct;
        if (auto word = keyed_word(l, {"is_correct", "sequence_correct"})) {
            correct = word_to_bool(*word);
            if (!correct) {
                parse.note = "unreadable value for the correctness key";
                return parse;
            }
        }
        if (!correct) {
            if (auto word = keyed_word(l, {"is correct", "verdict", "correct"})) correct = word_to_bool(*word);
        }
        if (!correct) {
            if (contains_any(l, {"incorrect", "not correct", "not in the correct order", "not in correct order",
                                 "out of order", "wrong order", "misordered", "not in order", "misplaced"})) {
                correct = false;
            } else if (contains_any(l, {"correct", "in order", "correctly ordered", "proper order", "right order"})) {
                correct = true;
            }
        }
        if (!correct) {
            parse.note = "no correctness verdict found";
            return parse;
        }
        OrderVerdict v;
        v.is_correct = *correct;
        if (auto mis = keyed_index_list(l, {"misplaced segments", "misplaced indices", "misplaced steps", "misplaced"})) {
            v.misplaced = *mis;
        }
        if (auto order = keyed_index_list(l, {"corrected order", "correct order", "reconstructed order", "corrected_order", "correct_order"})) {
            if (!order->empty()) v.corrected_order = *order;
        }
        v.reasoning = keyed_line(text, {"reasoning", "rationale", "explanation"});
        parse.verdict = std::move(v);
        finish_order(parse, segment_count);
    } catch (...) {
        parse.verdict.reset();
        parse.note = "internal parse error";
    }
    return parse;
}

OrderParse parse_order_verdict(const RawModelResponse& response, std::size_t segment_count) {
    if (response.task != Task::order_correction) {
        throw InvalidArgument("order verdicts come from order_correction responses");
    }
    if (!response.ok) return {std::nullopt, "request failed"};
    return parse_order_verdict(response.text, segment_count);
}

MissingParse parse_missing_verdict(std::string_view text) noexcept {
    MissingParse parse;
    try {
        for (const auto& doc : embedded_json(text)) {
            if (auto v = structured_missing(doc)) {
                if (v->has_missing && !v->predicted_caption) {
                    parse.note = "missing step claimed without a caption";
                    return parse;
                }
                parse.verdict = std::move(v);
                return parse;
            }
        }
        if (text.size() > 64 * 1024) {
            parse.note = "response too long for the text rules";
            return parse;
        }
        const std::string l = lower(text);
        std::optional<bool> missing;
        if (auto word = keyed_word(l, {"has_missing", "missing_event"})) {
            missing = word_to_bool(*word);
            if (!missing) {
                parse.note = "unreadable value for the completeness key";
                return parse;
            }
        }
        if (!missing) {
            if (auto word = keyed_word(l, {"has missing", "missing"})) missing = word_to_bool(*word);
        }
        if (!missing) {
            if (contains_any(l, {"no missing", "nothing is missing", "nothing missing", "no step is missing",
                                 "no steps are missing", "no action is missing", "no actions are missing",
                                 "is complete", "sequence is complete", "procedure is complete"})) {
                missing = false;
            } else if (contains_any(l, {"missing", "omitted", "skipped"})) {
                missing = true;
            }
        }
        if (!missing) {
            parse.note = "no completeness verdict found";
            return parse;
        }
        MissingVerdict v;
        v.has_missing = *missing;
        if (v.has_missing) {
            for (const auto& line : split_lines(text)) {
                if (line.size() > kMaxLineLength) continue;
                for (std::size_t pos = 0; pos < line.size(); ++pos) {
                    if (!is_digit(static_cast<unsigned char>(line[pos])) ||
                        (pos > 0 && (is_digit(static_cast<unsigned char>(line[pos - 1])) || line[pos - 1] == '.' || line[pos - 1] == ':'))) {
                        continue;
                    }
                    std::size_t p = pos;
                    if (auto iv = scan_time_range(line, p)) {
                        v.predicted_interval = iv;
                        if (auto seg = parse_segment_line(std::string_view(line).substr(pos))) {
                            if (!v.predicted_caption) v.predicted_caption = seg->caption();
                        }
                        break;
                    }
                }
                if (v.predicted_interval) break;
            }
            auto caption = keyed_line(text, {"caption", "missing step", "missing action", "missing event", "predicted caption"});
            if (!caption.empty()) v.predicted_caption = caption;
            if (!v.predicted_caption) {
                parse.note = "missing step claimed without a caption";
                return parse;
            }
        }
        v.reasoning = keyed_line(text, {"reasoning", "rationale", "explanation"});
        parse.verdict = std::move(v);
    } catch (...) {
        parse.verdict.reset();
        parse.note = "internal parse error";
    }
    return parse;
}

MissingParse parse_missing_verdict(const RawModelResponse& response) {
    if (response.task != Task::missing_event) {
        throw InvalidArgument("missing-event verdicts come from missing_event responses");
    }
    if (!response.ok) return {std::nullopt, "request failed"};
    return parse_missing_verdict(response.text);
}

std::string response_to_json_line(const RawModelResponse& r) {
    nlohmann::ordered_json j;
    j["schema"] = kDumpSchema;
    j["schema_version"] = kDumpSchemaVersion;
    j["request_id"] = r.request_id;
    j["task"] = to_string(r.task);
    j["video_id"] = r.video_id;
    j["status"] = r.ok ? "ok" : "failed";
    j["text"] = r.text;
    j["error"] = r.error;
    j["attempts"] = r.attempts;
    j["http_status"] = r.http_status;
    return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::vector<RawModelResponse> parse_dump_text(std::string_view text, std::string_view source) {
    std::vector<RawModelResponse> out;
    std::size_t line_no = 0;
    for (const auto& line : split_lines(text)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::string locus = std::string(source) + ":" + std::to_string(line_no);
        auto j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) throw ParseError(locus + ": not a JSON object");
        if (j.value("schema", "") != kDumpSchema || j.value("schema_version", 0) != kDumpSchemaVersion) {
            throw ParseError(locus + ": not a procassess.dump v1 record");
        }
        RawModelResponse r;
        try {
            r.request_id = j.at("request_id").get<std::string>();
            r.task = parse_task(j.at("task").get<std::string>());
            r.video_id = j.value("video_id", "");
            const auto status = j.at("status").get<std::string>();
            if (status != "ok" && status != "failed") throw ParseError(locus + ": bad status");
            r.ok = status == "ok";
            r.text = j.value("text", "");
            r.error = j.value("error", "");
            r.attempts = j.value("attempts", 1);
            r.http_status = j.value("http_status", 0);
        } catch (const json::exception& e) {
            throw ParseError(locus + ": " + e.what());
        } catch (const InvalidArgument& e) {
            throw ParseError(locus + ": " + e.what());
        }
        if (r.request_id.empty()) throw ParseError(locus + ": empty request_id");
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<RawModelResponse> read_dump(const std::filesystem::path& path) {
    return parse_dump_text(detail::read_file(path), path.string());
}

}  // namespace procassess
