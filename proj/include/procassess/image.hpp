#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace procassess {

/// 8-bit interleaved RGB raster.
class Raster {
public:
    Raster() = default;
    /// All-zero (black) image.
    Raster(int width, int height);
    Raster(int width, int height, std::vector<std::uint8_t> rgb);

    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] int height() const noexcept { return height_; }
    [[nodiscard]] bool empty() const noexcept { return width_ == 0 || height_ == 0; }

    [[nodiscard]] std::span<const std::uint8_t> data() const noexcept { return pixels_; }
    [[nodiscard]] std::span<std::uint8_t> data() noexcept { return pixels_; }

    [[nodiscard]] const std::uint8_t* pixel(int x, int y) const noexcept {
        return pixels_.data() + (static_cast<std::size_t>(y) * width_ + x) * 3;
    }
    [[nodiscard]] std::uint8_t* pixel(int x, int y) noexcept {
        return pixels_.data() + (static_cast<std::size_t>(y) * width_ + x) * 3;
    }

    void fill_rect(int x, int y, int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b);
    /// Copies `src` with its top-left corner at (x, y); clipped to this raster.
    void blit(const Raster& src, int x, int y);

    [[nodiscard]] bool all_zero() const noexcept;

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> pixels_;
};

/// Decodes any PNG libpng understands into 8-bit RGB (alpha dropped, gray expanded).
/// Throws InputError on unreadable or corrupt files.
[[nodiscard]] Raster read_png(const std::filesystem::path& path);

/// Width and height from the PNG header without decoding pixels.
[[nodiscard]] std::pair<int, int> read_png_size(const std::filesystem::path& path);

/// Writes 8-bit RGB PNG with fixed compression settings and no timestamp
/// chunk, so equal rasters always produce equal bytes.
void write_png(const std::filesystem::path& path, const Raster& image);

/// Bilinear resize to the requested size.
[[nodiscard]] Raster resize_bilinear(const Raster& src, int width, int height);

}  // namespace procassess
