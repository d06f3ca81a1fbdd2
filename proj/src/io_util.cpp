#include "io_util.hpp"

#include "procassess/errors.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace procassess::detail {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw InputError("cannot write " + path.string());
}

double require_number(const nlohmann::ordered_json& obj, const char* key, const std::string& locus) {
    if (!obj.is_object() || !obj.contains(key) || !obj[key].is_number()) {
        throw InputError(locus + ": field \"" + key + "\" must be a number");
    }
    return obj[key].get<double>();
}

std::string require_string(const nlohmann::ordered_json& obj, const char* key, const std::string& locus) {
    if (!obj.is_object() || !obj.contains(key) || !obj[key].is_string()) {
        throw InputError(locus + ": field \"" + key + "\" must be a string");
    }
    return obj[key].get<std::string>();
}

std::string format_number(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

std::string format_fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    std::string s = buf;
    if (s.rfind("-0.", 0) == 0 && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

}  // namespace procassess::detail
