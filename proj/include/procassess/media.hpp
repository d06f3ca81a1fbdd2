#pragma once

#include "procassess/image.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace procassess {

/// A sampled frame: position in the clip, its timestamp (index / fps) and pixels.
struct Frame {
    std::int64_t index = 0;
    double timestamp = 0.0;
    Raster pixels;
};

enum class OverlayFont {
    automatic,   ///< largest standard scale that fits, else the compact face
    standard,    ///< 5x7 cells
    compact,     ///< 3x5 cells, for narrow frames
};

struct OverlayStyle {
    int offset_x = 4;
    int offset_y = 4;
    OverlayFont font = OverlayFont::automatic;
    /// Integer pixel scale of the glyph cells; 0 picks the largest that fits (up to 3).
    int scale = 0;
    std::uint8_t foreground[3] = {255, 255, 255};
    std::uint8_t background[3] = {0, 0, 0};
    /// printf pattern receiving (whole seconds, milliseconds) as two ints.
    std::string format = "%02d:%03d";
};

/// Screen rectangle of a rendered label.
struct OverlayBox {
    int x = 0;
    int y = 0;
    int width = 0;
    int height = 0;

    [[nodiscard]] bool contains(int px, int py) const noexcept {
        return px >= x && px < x + width && py >= y && py < y + height;
    }
};

/// "SS:MS" label, e.g. 3.5 s -> "03:500". Milliseconds are rounded to nearest.
[[nodiscard]] std::string format_timestamp(double seconds, std::string_view pattern = "%02d:%03d");

/// Where `label` would be drawn on a frame of the given size. Throws
/// InvalidArgument when the box would exceed a quarter of the frame width or
/// leave the frame.
[[nodiscard]] OverlayBox overlay_box(std::string_view label, int frame_width, int frame_height,
                                     const OverlayStyle& style = {});

/// Burns `label` into a copy of `image`; only pixels inside overlay_box change.
[[nodiscard]] Raster render_label(const Raster& image, std::string_view label,
                                  const OverlayStyle& style = {});

/// Copy of `frame` with its timestamp burned into the top-left corner.
[[nodiscard]] Frame render_timestamp(const Frame& frame, const OverlayStyle& style = {});

/// Name of frame `index` inside a frame directory: frame_%06d.png.
[[nodiscard]] std::string frame_file_name(std::int64_t index);

/// Frame files of `dir` in index order. Throws InputError if the directory is
/// missing or empty, or if indices are not exactly 0..n-1.
[[nodiscard]] std::vector<std::filesystem::path> list_frame_files(const std::filesystem::path& dir);

/// Decodes every frame of `dir` and stamps timestamps index / fps.
[[nodiscard]] std::vector<Frame> sample_frames(const std::filesystem::path& dir, double fps = 1.0);

struct StoryboardTile {
    std::size_t tile = 0;
    std::int64_t source_frame = 0;
    double timestamp = 0.0;
    int x = 0;
    int y = 0;
    int width = 0;
};

struct Storyboard {
    Raster image;
    int tile_height = 0;
    std::vector<StoryboardTile> tiles;
};

struct StoryboardOptions {
    /// Rows wrap once adding a tile would exceed this width.
    int max_width = 16384;
    bool overlay = true;
};

/// Scales frames to the smallest height (aspect kept), stamps each tile and
/// concatenates them left to right in the given order.
[[nodiscard]] Storyboard compose_storyboard(const std::vector<Frame>& frames,
                                            const OverlayStyle& style = {},
                                            const StoryboardOptions& options = {});

/// Writes the composite PNG and its JSON sidecar (tile -> frame, timestamp, offsets).
void write_storyboard(const Storyboard& board, double fps, const std::filesystem::path& image_path,
                      const std::filesystem::path& sidecar_path);

}  // namespace procassess
