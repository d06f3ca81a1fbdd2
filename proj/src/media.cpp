#include "procassess/media.hpp"

#include "font.hpp"
#include "procassess/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <regex>

namespace procassess {

namespace fs = std::filesystem;

namespace {

constexpr int kMaxAutoScale = 3;

struct Layout {
    bool compact = false;
    int scale = 1;
    OverlayBox box;
};

OverlayBox box_for(std::size_t glyphs, int glyph_w, int glyph_h, int scale, const OverlayStyle& s) {
    const int n = static_cast<int>(glyphs);
    const int pad = scale;
    OverlayBox box;
    box.x = s.offset_x;
    box.y = s.offset_y;
    box.width = 2 * pad + n * glyph_w * scale + std::max(0, n - 1) * scale;
    box.height = 2 * pad + glyph_h * scale;
    return box;
}

bool fits(const OverlayBox& box, int frame_w, int frame_h) {
    return box.width * 4 <= frame_w && box.x + box.width <= frame_w &&
           box.y + box.height <= frame_h;
}

Layout choose_layout(std::string_view label, int frame_w, int frame_h, const OverlayStyle& style) {
    if (label.empty()) throw InvalidArgument("overlay label is empty");
    if (style.offset_x < 0 || style.offset_y < 0 || style.scale < 0) {
        throw InvalidArgument("overlay offsets and scale must be non-negative");
    }
    for (char c : label) {
        if (!font::standard_glyph(c)) {
            throw InvalidArgument(std::string("overlay font has no glyph for '") + c + "'");
        }
    }
    const auto n = label.size();
    auto too_small = [&] {
        return InvalidArgument("frame " + std::to_string(frame_w) + "x" + std::to_string(frame_h) +
                               " is too small for overlay '" + std::string(label) + "'");
    };

    if (style.font == OverlayFont::compact) {
        const int scale = std::max(1, style.scale);
        Layout l{true, scale, box_for(n, 3, 5, scale, style)};
        if (!fits(l.box, frame_w, frame_h)) throw too_small();
        return l;
    }
    if (style.scale > 0) {
        Layout l{false, style.scale, box_for(n, 5, 7, style.scale, style)};
        if (fits(l.box, frame_w, frame_h)) return l;
        if (style.font == OverlayFont::standard) throw too_small();
    } else {
        for (int scale = kMaxAutoScale; scale >= 1; --scale) {
            Layout l{false, scale, box_for(n, 5, 7, scale, style)};
            if (fits(l.box, frame_w, frame_h)) return l;
        }
        if (style.font == OverlayFont::standard) throw too_small();
    }
    Layout l{true, 1, box_for(n, 3, 5, 1, style)};
    if (!fits(l.box, frame_w, frame_h)) throw too_small();
    return l;
}

// Accepts exactly two integer conversions (optionally zero-padded with a width) and "%%".
void check_timestamp_pattern(std::string_view pattern) {
    static const std::regex conversion(R"(%(%|0?[0-9]{0,2}d))");
    int ints = 0;
    std::string p(pattern);
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] != '%') continue;
        std::smatch m;
        const std::string rest = p.substr(i);
        if (!std::regex_search(rest, m, conversion, std::regex_constants::match_continuous)) {
            throw InvalidArgument("unsupported timestamp pattern '" + p + "'");
        }
        if (m.str(1) != "%") ++ints;
        i += m.length(0) - 1;
    }
    if (ints != 2) {
        throw InvalidArgument("timestamp pattern '" + p + "' must take seconds and milliseconds");
    }
}

}  // namespace

std::string format_timestamp(double seconds, std::string_view pattern) {
    if (!std::isfinite(seconds) || seconds < 0.0) {
        throw InvalidArgument("timestamp must be a non-negative number of seconds");
    }
    check_timestamp_pattern(pattern);
    const long long total_ms = std::llround(seconds * 1000.0);
    const int whole = static_cast<int>(total_ms / 1000);
    const int ms = static_cast<int>(total_ms % 1000);
    char buf[64];
    const std::string pat(pattern);
    std::snprintf(buf, sizeof buf, pat.c_str(), whole, ms);
    return buf;
}

OverlayBox overlay_box(std::string_view label, int frame_width, int frame_height,
                       const OverlayStyle& style) {
    return choose_layout(label, frame_width, frame_height, style).box;
}

Raster render_label(const Raster& image, std::string_view label, const OverlayStyle& style) {
    const Layout layout = choose_layout(label, image.width(), image.height(), style);
    Raster out = image;
    const auto& box = layout.box;
    out.fill_rect(box.x, box.y, box.width, box.height, style.background[0], style.background[1],
                  style.background[2]);

    const int s = layout.scale;
    int pen_x = box.x + s;
    const int pen_y = box.y + s;
    for (char c : label) {
        const auto glyph = layout.compact ? font::compact_glyph(c) : font::standard_glyph(c);
        if (!glyph) throw InvalidArgument(std::string("overlay font has no glyph for '") + c + "'");
        for (int row = 0; row < glyph->height; ++row) {
            for (int col = 0; col < glyph->width; ++col) {
                const bool on = (glyph->rows[row] >> (glyph->width - 1 - col)) & 1U;
                if (!on) continue;
                out.fill_rect(pen_x + col * s, pen_y + row * s, s, s, style.foreground[0],
                              style.foreground[1], style.foreground[2]);
            }
        }
        pen_x += (glyph->width + 1) * s;
    }
    return out;
}

Frame render_timestamp(const Frame& frame, const OverlayStyle& style) {
    Frame out{frame.index, frame.timestamp, {}};
    out.pixels = render_label(frame.pixels, format_timestamp(frame.timestamp, style.format), style);
    return out;
}

std::string frame_file_name(std::int64_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "frame_%06lld.png", static_cast<long long>(index));
    return buf;
}

std::vector<fs::path> list_frame_files(const fs::path& dir) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw InputError("frame directory " + dir.string() + " not found");
    static const std::regex name(R"(frame_(\d{6,})\.png)");
    std::map<std::int64_t, fs::path> found;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::smatch m;
        const std::string fname = entry.path().filename().string();
        if (!std::regex_match(fname, m, name)) continue;
        found.emplace(std::stoll(m.str(1)), entry.path());
    }
    if (found.empty()) throw InputError("frame directory " + dir.string() + " has no frames");
    std::vector<fs::path> out;
    std::int64_t expected = 0;
    for (auto& [index, path] : found) {
        if (index != expected) {
            throw InputError("frame directory " + dir.string() + " is missing " +
                             frame_file_name(expected));
        }
        out.push_back(path);
        ++expected;
    }
    return out;
}

std::vector<Frame> sample_frames(const fs::path& dir, double fps) {
    if (!(fps > 0.0) || !std::isfinite(fps)) throw InvalidArgument("fps must be positive");
    const auto files = list_frame_files(dir);
    std::vector<Frame> frames;
    frames.reserve(files.size());
    for (std::size_t i = 0; i < files.size(); ++i) {
        const auto index = static_cast<std::int64_t>(i);
        frames.push_back({index, static_cast<double>(index) / fps, read_png(files[i])});
    }
    return frames;
}

Storyboard compose_storyboard(const std::vector<Frame>& frames, const OverlayStyle& style,
                              const StoryboardOptions& options) {
    if (frames.empty()) throw InvalidArgument("storyboard needs at least one frame");
    if (options.max_width <= 0) throw InvalidArgument("storyboard max width must be positive");
    int height = frames.front().pixels.height();
    for (const auto& f : frames) {
        if (f.pixels.empty()) throw InvalidArgument("storyboard frame " + std::to_string(f.index) + " is empty");
        height = std::min(height, f.pixels.height());
    }

    std::vector<Raster> tiles;
    tiles.reserve(frames.size());
    for (const auto& f : frames) {
        const int w = f.pixels.height() == height
                          ? f.pixels.width()
                          : std::max(1, static_cast<int>(std::lround(
                                            static_cast<double>(f.pixels.width()) * height /
                                            f.pixels.height())));
        Raster tile = resize_bilinear(f.pixels, w, height);
        if (options.overlay) {
            tile = render_label(tile, format_timestamp(f.timestamp, style.format), style);
        }
        tiles.push_back(std::move(tile));
    }

    Storyboard board;
    board.tile_height = height;
    int x = 0, row = 0, max_row_width = 0;
    for (std::size_t i = 0; i < tiles.size(); ++i) {
        const int w = tiles[i].width();
        if (x > 0 && x + w > options.max_width) {
            ++row;
            x = 0;
        }
        board.tiles.push_back({i, frames[i].index, frames[i].timestamp, x, row * height, w});
        x += w;
        max_row_width = std::max(max_row_width, x);
    }
    board.image = Raster(max_row_width, (row + 1) * height);
    for (std::size_t i = 0; i < tiles.size(); ++i) {
        board.image.blit(tiles[i], board.tiles[i].x, board.tiles[i].y);
    }
    return board;
}

void write_storyboard(const Storyboard& board, double fps, const fs::path& image_path,
                      const fs::path& sidecar_path) {
    write_png(image_path, board.image);
    nlohmann::ordered_json doc;
    doc["schema"] = "procassess.storyboard";
    doc["schema_version"] = 1;
    doc["fps"] = fps;
    doc["width"] = board.image.width();
    doc["height"] = board.image.height();
    doc["tile_height"] = board.tile_height;
    auto& tiles = doc["tiles"] = nlohmann::ordered_json::array();
    for (const auto& t : board.tiles) {
        tiles.push_back({{"tile", t.tile},
                         {"source_frame", t.source_frame},
                         {"timestamp", t.timestamp},
                         {"x", t.x},
                         {"y", t.y},
                         {"width", t.width}});
    }
    std::ofstream out(sidecar_path, std::ios::binary);
    if (!out) throw InputError("cannot write storyboard sidecar " + sidecar_path.string());
    out << doc.dump(2) << '\n';
    if (!out) throw InputError("cannot write storyboard sidecar " + sidecar_path.string());
}

}  // namespace procassess
