#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include "procassess/infer.hpp"

#include "io_util.hpp"
#include "json.hpp"
#include "procassess/errors.hpp"
#include "procassess/log.hpp"
#include "procassess/rng.hpp"

#include <openssl/evp.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <thread>

namespace procassess {

using json = nlohmann::ordered_json;

namespace {

std::optional<std::string> env(std::string_view name) {
    const char* v = std::getenv(std::string(name).c_str());
    if (v == nullptr || *v == '\0') return std::nullopt;
    return std::string(v);
}

void real_sleep(double seconds) {
    std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
}

}  // namespace

void EndpointConfig::validate() const {
    if (max_parallel < 1) throw InvalidArgument("max_parallel must be at least 1");
    if (!(request_timeout > 0.0)) throw InvalidArgument("request timeout must be positive");
    if (max_retries < 0) throw InvalidArgument("max_retries must not be negative");
    if (!(backoff_base >= 0.0) || !std::isfinite(backoff_base)) throw InvalidArgument("backoff base must be >= 0");
    if (base_url.rfind("http://", 0) != 0 && base_url.rfind("https://", 0) != 0) {
        throw InvalidArgument("base url must start with http:// or https://");
    }
    if (model_name.empty()) throw InvalidArgument("model name must not be empty");
}

EndpointConfig EndpointConfig::from_environment() {
    EndpointConfig c;
    if (auto k = env(kApiKeyEnv)) c.api_key = *k;
    else if (auto o = env("OPENAI_API_KEY")) c.api_key = *o;
    if (auto u = env(kBaseUrlEnv)) c.base_url = *u;
    else if (auto o = env("OPENAI_BASE_URL")) c.base_url = *o;
    return c;
}

bool is_transient(const HttpReply& reply) noexcept {
    return reply.status == 0 || reply.status == 429 || (reply.status >= 500 && reply.status <= 599);
}

HttpTransport::HttpTransport(EndpointConfig config) : config_(std::move(config)) {
    config_.validate();
    const auto scheme_end = config_.base_url.find("://") + 3;
    const auto slash = config_.base_url.find('/', scheme_end);
    origin_ = config_.base_url.substr(0, slash);
    path_ = slash == std::string::npos ? "" : config_.base_url.substr(slash);
    while (!path_.empty() && path_.back() == '/') path_.pop_back();
    path_ += "/chat/completions";
}

HttpReply HttpTransport::send(const RenderedRequest&, const std::string& body) {
    httplib::Client client(origin_);
    const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::duration<double>(config_.request_timeout));
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    httplib::Headers headers;
    if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);
    auto res = client.Post(path_, headers, body, "application/json");
    HttpReply reply;
    if (!res) {
        reply.error = httplib::to_string(res.error());
        return reply;
    }
    reply.status = res->status;
    reply.body = res->body;
    if (reply.status != 200) reply.error = "HTTP " + std::to_string(reply.status);
    return reply;
}

CannedTransport::CannedTransport(std::map<std::string, std::string> answers) : answers_(std::move(answers)) {}

HttpReply CannedTransport::send(const RenderedRequest& request, const std::string&) {
    const auto it = answers_.find(request.request_id);
    if (it == answers_.end()) return {404, "", "no canned answer for " + request.request_id};
    json body = {{"choices", json::array({{{"index", 0}, {"message", {{"role", "assistant"}, {"content", it->second}}}}})}};
    return {200, body.dump(), ""};
}

std::string base64_encode(std::string_view bytes) {
    std::string out(4 * ((bytes.size() + 2) / 3), '\0');
    const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                  reinterpret_cast<const unsigned char*>(bytes.data()),
                                  static_cast<int>(bytes.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

std::string build_chat_body(const RenderedRequest& request, const EndpointConfig& config) {
    json user_content = json::array();
    user_content.push_back({{"type", "text"}, {"text", request.user}});
    if (request.image) {
        const auto png = detail::read_file(*request.image);
        user_content.push_back(
            {{"type", "image_url"}, {"image_url", {{"url", "data:image/png;base64," + base64_encode(png)}}}});
    }
    json body;
    body["model"] = config.model_name;
    body["temperature"] = config.temperature;
    body["messages"] = json::array({{{"role", "system"}, {"content", request.system}},
                                    {{"role", "user"}, {"content", user_content}}});
    return body.dump();
}

std::string extract_message_text(std::string_view body) {
    json doc = json::parse(body, nullptr, false);
    if (doc.is_discarded()) throw ParseError("completion body is not JSON");
    try {
        const auto& content = doc.at("choices").at(0).at("message").at("content");
        if (content.is_string()) return content.get<std::string>();
        // Some servers answer with content parts.
        std::string text;
        for (const auto& part : content) {
            if (part.contains("text")) text += part["text"].get<std::string>();
        }
        return text;
    } catch (const json::exception&) {
        throw ParseError("completion body has no choices[0].message.content");
    }
}

double backoff_delay(const EndpointConfig& config, const std::string& request_id, int attempt) {
    SplitMix64 rng(derive_seed(config.jitter_seed, request_id, static_cast<std::uint64_t>(attempt)));
    return config.backoff_base * std::ldexp(1.0, attempt - 1) * (1.0 + rng.uniform_real());
}

DumpWriter::DumpWriter(const std::filesystem::path& path) : path_(path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::error_code ec;
    if (std::filesystem::exists(path, ec)) {
        auto text = detail::read_file(path);
        if (!text.empty() && text.back() != '\n') {
            const auto keep = text.rfind('\n');
            text.resize(keep == std::string::npos ? 0 : keep + 1);
            detail::write_file(path, text);
            log_event(LogLevel::warn, "dump_tail_dropped", {{"path", path.string()}});
        }
    }
    out_.open(path, std::ios::binary | std::ios::app);
    if (!out_) throw InputError("cannot open dump for append: " + path.string());
}

void DumpWriter::write(const RawModelResponse& response) {
    const auto line = response_to_json_line(response) + "\n";
    std::lock_guard lock(mutex_);
    out_.write(line.data(), static_cast<std::streamsize>(line.size()));
    out_.flush();
    if (!out_) throw InputError("write to dump failed: " + path_.string());
}

std::set<std::string> completed_request_ids(const std::filesystem::path& dump_path) {
    std::set<std::string> done;
    std::error_code ec;
    if (!std::filesystem::exists(dump_path, ec)) return done;
    for (const auto& r : read_dump(dump_path)) {
        if (r.ok) done.insert(r.request_id);
    }
    return done;
}

namespace {

RawModelResponse run_one(const RenderedRequest& request, const EndpointConfig& config, Transport& transport,
                         const std::function<void(double)>& sleeper) {
    RawModelResponse out;
    out.request_id = request.request_id;
    out.task = request.task;
    out.video_id = request.video_id;
    std::string body;
    try {
        body = build_chat_body(request, config);
    } catch (const std::exception& e) {
        out.ok = false;
        out.attempts = 0;
        out.error = e.what();
        return out;
    }
    for (int attempt = 1;; ++attempt) {
        HttpReply reply;
        try {
            reply = transport.send(request, body);
        } catch (const std::exception& e) {
            reply = {0, "", e.what()};
        }
        out.attempts = attempt;
        out.http_status = reply.status;
        if (reply.status == 200) {
            try {
                out.text = extract_message_text(reply.body);
                out.ok = true;
                out.error.clear();
            } catch (const ParseError& e) {
                out.ok = false;
                out.error = e.what();
            }
            return out;
        }
        out.ok = false;
        out.error = reply.error.empty() ? "HTTP " + std::to_string(reply.status) : reply.error;
        if (!is_transient(reply) || attempt > config.max_retries) return out;
        const double wait = backoff_delay(config, request.request_id, attempt);
        log_event(LogLevel::warn, "request_retry",
                  {{"request_id", request.request_id}, {"attempt", std::to_string(attempt)},
                   {"status", std::to_string(reply.status)}, {"wait_s", detail::format_number(wait)}});
        sleeper(wait);
    }
}

}  // namespace

std::vector<RawModelResponse> infer_batch(std::span<const RenderedRequest> requests, const EndpointConfig& config,
                                          Transport& transport, const InferOptions& options) {
    config.validate();
    if (requests.empty()) throw InvalidArgument("inference batch is empty");
    const auto sleeper = options.sleeper ? options.sleeper : std::function<void(double)>(real_sleep);

    std::vector<std::optional<RawModelResponse>> slots(requests.size());
    std::mutex flush_mutex;
    std::size_t flushed = 0;
    std::atomic<std::size_t> next{0};
    std::exception_ptr dump_error;

    auto worker = [&] {
        while (true) {
            const auto i = next.fetch_add(1);
            if (i >= requests.size()) return;
            auto response = run_one(requests[i], config, transport, sleeper);
            std::lock_guard lock(flush_mutex);
            slots[i] = std::move(response);
            while (flushed < slots.size() && slots[flushed]) {
                if (options.dump != nullptr && !dump_error) {
                    try {
                        options.dump->write(*slots[flushed]);
                    } catch (...) {
                        dump_error = std::current_exception();
                    }
                }
                ++flushed;
            }
        }
    };

    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(config.max_parallel), requests.size());
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (dump_error) std::rethrow_exception(dump_error);

    std::vector<RawModelResponse> out;
    out.reserve(slots.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

}  // namespace procassess
