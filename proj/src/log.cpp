#include "procassess/log.hpp"

#include "json.hpp"
#include "procassess/errors.hpp"

#include <atomic>
#include <cstdio>
#include <mutex>

namespace procassess {

namespace {
std::atomic<LogLevel> g_level{LogLevel::info};
std::mutex g_mutex;

const char* level_name(LogLevel level) {
    switch (level) {
        case LogLevel::debug: return "debug";
        case LogLevel::info: return "info";
        case LogLevel::warn: return "warn";
        case LogLevel::error: return "error";
        case LogLevel::quiet: return "quiet";
    }
    return "info";
}
}  // namespace

void set_log_level(LogLevel level) noexcept { g_level.store(level); }
LogLevel log_level() noexcept { return g_level.load(); }

LogLevel parse_log_level(std::string_view name) {
    for (auto l : {LogLevel::debug, LogLevel::info, LogLevel::warn, LogLevel::error, LogLevel::quiet}) {
        if (name == level_name(l)) return l;
    }
    throw InvalidArgument("unknown log level '" + std::string(name) + "'");
}

void log_event(LogLevel level, std::string_view event, std::initializer_list<LogField> fields) {
    if (level == LogLevel::quiet || level < g_level.load()) return;
    nlohmann::ordered_json line;
    line["level"] = level_name(level);
    line["event"] = event;
    for (const auto& [k, v] : fields) line[std::string(k)] = v;
    const auto text = line.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
    std::lock_guard lock(g_mutex);
    std::fwrite(text.data(), 1, text.size(), stderr);
    std::fflush(stderr);
}

}  // namespace procassess
