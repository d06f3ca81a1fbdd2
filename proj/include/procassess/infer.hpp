#pragma once

#include "procassess/prompt.hpp"
#include "procassess/responses.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace procassess {

inline constexpr std::string_view kApiKeyEnv = "PROCASSESS_API_KEY";
inline constexpr std::string_view kBaseUrlEnv = "PROCASSESS_BASE_URL";

struct EndpointConfig {
    std::string base_url = "https://api.openai.com/v1";
    std::string api_key;
    std::string model_name = "gpt-4o";
    double request_timeout = 120.0;  ///< seconds
    int max_parallel = 4;
    int max_retries = 3;             ///< extra attempts after the first
    double backoff_base = 1.0;       ///< seconds; doubled per retry, plus jitter
    double temperature = 0.0;
    std::uint64_t jitter_seed = 0;

    void validate() const;

    /// Defaults overridden by PROCASSESS_API_KEY / PROCASSESS_BASE_URL, falling
    /// back to OPENAI_API_KEY / OPENAI_BASE_URL.
    [[nodiscard]] static EndpointConfig from_environment();
};

/// What came back over the wire. status 0 means no HTTP response (timeout, refused, TLS).
struct HttpReply {
    int status = 0;
    std::string body;
    std::string error;
};

[[nodiscard]] bool is_transient(const HttpReply& reply) noexcept;

class Transport {
public:
    virtual ~Transport() = default;
    /// Must be safe to call from several threads at once.
    virtual HttpReply send(const RenderedRequest& request, const std::string& body) = 0;
};

/// OpenAI-compatible POST <base_url>/chat/completions over HTTP or HTTPS.
class HttpTransport final : public Transport {
public:
    explicit HttpTransport(EndpointConfig config);
    HttpReply send(const RenderedRequest& request, const std::string& body) override;

private:
    EndpointConfig config_;
    std::string origin_;
    std::string path_;
};

/// Answers from a table keyed by request id, wrapped as chat completions.
/// Unknown ids get 404. Used for offline runs and tests.
class CannedTransport final : public Transport {
public:
    explicit CannedTransport(std::map<std::string, std::string> answers);
    HttpReply send(const RenderedRequest& request, const std::string& body) override;

private:
    std::map<std::string, std::string> answers_;
};

[[nodiscard]] std::string base64_encode(std::string_view bytes);

/// Chat-completions request body; the storyboard travels as a base64 PNG data URL.
[[nodiscard]] std::string build_chat_body(const RenderedRequest& request, const EndpointConfig& config);

/// choices[0].message.content; throws ParseError if the body has none.
[[nodiscard]] std::string extract_message_text(std::string_view body);

/// Delay before retry number `attempt` (1-based): backoff_base * 2^(attempt-1) * (1 + u),
/// u in [0, 1) drawn deterministically from (jitter_seed, request id, attempt).
[[nodiscard]] double backoff_delay(const EndpointConfig& config, const std::string& request_id, int attempt);

/// Serialized, append-only JSON Lines writer. A torn final line left by an
/// interrupted run is dropped when the file is reopened.
class DumpWriter {
public:
    explicit DumpWriter(const std::filesystem::path& path);
    void write(const RawModelResponse& response);
    [[nodiscard]] const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::mutex mutex_;
};

/// Ids that already have a successful record in the dump (empty if the file is absent).
[[nodiscard]] std::set<std::string> completed_request_ids(const std::filesystem::path& dump_path);

struct InferOptions {
    /// Called for backoff waits. Defaults to a real sleep.
    std::function<void(double seconds)> sleeper;
    /// Responses are written here in request order as soon as their prefix is complete.
    DumpWriter* dump = nullptr;
};

/// Runs every request with at most max_parallel in flight and returns responses in
/// request order. Each failure is recorded on its own response; the batch never aborts.
[[nodiscard]] std::vector<RawModelResponse> infer_batch(std::span<const RenderedRequest> requests,
                                                        const EndpointConfig& config, Transport& transport,
                                                        const InferOptions& options = {});

}  // namespace procassess
