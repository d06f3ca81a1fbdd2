#include "font.hpp"

namespace procassess::font {

std::optional<Glyph> standard_glyph(char c) noexcept {
    using R = std::array<std::uint8_t, 7>;
    switch (c) {
        case '0': return Glyph{5, 7, R{0b01110, 0b10001, 0b10011, 0b10101, 0b11001, 0b10001, 0b01110}};
        case '1': return Glyph{5, 7, R{0b00100, 0b01100, 0b00100, 0b00100, 0b00100, 0b00100, 0b01110}};
        case '2': return Glyph{5, 7, R{0b01110, 0b10001, 0b00001, 0b00010, 0b00100, 0b01000, 0b11111}};
        case '3': return Glyph{5, 7, R{0b11111, 0b00010, 0b00100, 0b00010, 0b00001, 0b10001, 0b01110}};
        case '4': return Glyph{5, 7, R{0b00010, 0b00110, 0b01010, 0b10010, 0b11111, 0b00010, 0b00010}};
        case '5': return Glyph{5, 7, R{0b11111, 0b10000, 0b11110, 0b00001, 0b00001, 0b10001, 0b01110}};
        case '6': return Glyph{5, 7, R{0b00110, 0b01000, 0b10000, 0b11110, 0b10001, 0b10001, 0b01110}};
        case '7': return Glyph{5, 7, R{0b11111, 0b00001, 0b00010, 0b00100, 0b01000, 0b01000, 0b01000}};
        case '8': return Glyph{5, 7, R{0b01110, 0b10001, 0b10001, 0b01110, 0b10001, 0b10001, 0b01110}};
        case '9': return Glyph{5, 7, R{0b01110, 0b10001, 0b10001, 0b01111, 0b00001, 0b00010, 0b01100}};
        case ':': return Glyph{5, 7, R{0b00000, 0b01100, 0b01100, 0b00000, 0b01100, 0b01100, 0b00000}};
        case '.': return Glyph{5, 7, R{0b00000, 0b00000, 0b00000, 0b00000, 0b00000, 0b01100, 0b01100}};
        case '-': return Glyph{5, 7, R{0b00000, 0b00000, 0b00000, 0b11111, 0b00000, 0b00000, 0b00000}};
        case 's': return Glyph{5, 7, R{0b00000, 0b00000, 0b01110, 0b10000, 0b01110, 0b00001, 0b11110}};
        case ' ': return Glyph{5, 7, R{}};
        default: return std::nullopt;
    }
}

std::optional<Glyph> compact_glyph(char c) noexcept {
    using R = std::array<std::uint8_t, 7>;
    switch (c) {
        case '0': return Glyph{3, 5, R{0b111, 0b101, 0b101, 0b101, 0b111}};
        case '1': return Glyph{3, 5, R{0b010, 0b110, 0b010, 0b010, 0b111}};
        case '2': return Glyph{3, 5, R{0b111, 0b001, 0b111, 0b100, 0b111}};
        case '3': return Glyph{3, 5, R{0b111, 0b001, 0b111, 0b001, 0b111}};
        case '4': return Glyph{3, 5, R{0b101, 0b101, 0b111, 0b001, 0b001}};
        case '5': return Glyph{3, 5, R{0b111, 0b100, 0b111, 0b001, 0b111}};
        case '6': return Glyph{3, 5, R{0b111, 0b100, 0b111, 0b101, 0b111}};
        case '7': return Glyph{3, 5, R{0b111, 0b001, 0b010, 0b010, 0b010}};
        case '8': return Glyph{3, 5, R{0b111, 0b101, 0b111, 0b101, 0b111}};
        case '9': return Glyph{3, 5, R{0b111, 0b101, 0b111, 0b001, 0b111}};
        case ':': return Glyph{3, 5, R{0b000, 0b010, 0b000, 0b010, 0b000}};
        case '.': return Glyph{3, 5, R{0b000, 0b000, 0b000, 0b000, 0b010}};
        case '-': return Glyph{3, 5, R{0b000, 0b000, 0b111, 0b000, 0b000}};
        case 's': return Glyph{3, 5, R{0b011, 0b100, 0b010, 0b001, 0b110}};
        case ' ': return Glyph{3, 5, R{}};
        default: return std::nullopt;
    }
}

}  // namespace procassess::font
