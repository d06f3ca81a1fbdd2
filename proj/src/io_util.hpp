#pragma once

#include "json.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace procassess::detail {

/// Whole file as bytes; InputError when it cannot be opened.
std::string read_file(const std::filesystem::path& path);
/// Writes (truncating) and creates parent directories.
void write_file(const std::filesystem::path& path, std::string_view contents);

double require_number(const nlohmann::ordered_json& obj, const char* key, const std::string& locus);
std::string require_string(const nlohmann::ordered_json& obj, const char* key, const std::string& locus);

/// Shortest round-trippable decimal form.
std::string format_number(double value);
/// Fixed-point with `decimals` digits.
std::string format_fixed(double value, int decimals);

}  // namespace procassess::detail
