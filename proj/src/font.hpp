#pragma once

#include <array>
#include <cstdint>
#include <optional>

namespace procassess::font {

/// One glyph as row bitmasks, most significant used bit leftmost.
struct Glyph {
    int width;
    int height;
    std::array<std::uint8_t, 7> rows;
};

/// 5x7 face for digits, ':', '.', '-', 's' and space.
std::optional<Glyph> standard_glyph(char c) noexcept;

/// 3x5 face covering the same characters.
std::optional<Glyph> compact_glyph(char c) noexcept;

}  // namespace procassess::font
