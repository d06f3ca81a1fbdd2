#pragma once

#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>

namespace procassess {

enum class LogLevel { debug, info, warn, error, quiet };

void set_log_level(LogLevel level) noexcept;
[[nodiscard]] LogLevel log_level() noexcept;
[[nodiscard]] LogLevel parse_log_level(std::string_view name);

using LogField = std::pair<std::string_view, std::string>;

/// One JSON object per line on stderr: {"level":..,"event":..,<fields>}. Thread-safe.
void log_event(LogLevel level, std::string_view event, std::initializer_list<LogField> fields = {});

}  // namespace procassess
