#include "procassess/image.hpp"

#include "procassess/errors.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>

namespace procassess {

namespace {

struct PngImage {
    png_image image{};
    PngImage() {
        image.version = PNG_IMAGE_VERSION;
    }
    ~PngImage() { png_image_free(&image); }
    PngImage(const PngImage&) = delete;
    PngImage& operator=(const PngImage&) = delete;
};

std::size_t byte_count(int width, int height) {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3;
}

}  // namespace

Raster::Raster(int width, int height)
    : width_(width), height_(height), pixels_(byte_count(width, height), 0) {
    if (width < 0 || height < 0) throw InvalidArgument("raster dimensions must be non-negative");
}

Raster::Raster(int width, int height, std::vector<std::uint8_t> rgb)
    : width_(width), height_(height), pixels_(std::move(rgb)) {
    if (width < 0 || height < 0 || pixels_.size() != byte_count(width, height)) {
        throw InvalidArgument("raster buffer does not match its dimensions");
    }
}

void Raster::fill_rect(int x, int y, int w, int h, std::uint8_t r, std::uint8_t g,
                       std::uint8_t b) {
    const int x0 = std::max(0, x), y0 = std::max(0, y);
    const int x1 = std::min(width_, x + w), y1 = std::min(height_, y + h);
    for (int yy = y0; yy < y1; ++yy) {
        for (int xx = x0; xx < x1; ++xx) {
            auto* p = pixel(xx, yy);
            p[0] = r;
            p[1] = g;
            p[2] = b;
        }
    }
}

void Raster::blit(const Raster& src, int x, int y) {
    const int x0 = std::max(0, x), y0 = std::max(0, y);
    const int x1 = std::min(width_, x + src.width()), y1 = std::min(height_, y + src.height());
    if (x1 <= x0) return;
    for (int yy = y0; yy < y1; ++yy) {
        std::memcpy(pixel(x0, yy), src.pixel(x0 - x, yy - y),
                    static_cast<std::size_t>(x1 - x0) * 3);
    }
}

bool Raster::all_zero() const noexcept {
    return std::all_of(pixels_.begin(), pixels_.end(), [](std::uint8_t v) { return v == 0; });
}

Raster read_png(const std::filesystem::path& path) {
    PngImage png;
    if (!png_image_begin_read_from_file(&png.image, path.c_str())) {
        throw InputError("cannot read image " + path.string() + ": " + png.image.message);
    }
    png.image.format = PNG_FORMAT_RGB;
    const int width = static_cast<int>(png.image.width);
    const int height = static_cast<int>(png.image.height);
    std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(png.image));
    if (!png_image_finish_read(&png.image, nullptr, buffer.data(), 0, nullptr)) {
        throw InputError("cannot decode image " + path.string() + ": " + png.image.message);
    }
    return Raster(width, height, std::move(buffer));
}

std::pair<int, int> read_png_size(const std::filesystem::path& path) {
    PngImage png;
    if (!png_image_begin_read_from_file(&png.image, path.c_str())) {
        throw InputError("cannot read image " + path.string() + ": " + png.image.message);
    }
    return {static_cast<int>(png.image.width), static_cast<int>(png.image.height)};
}

void write_png(const std::filesystem::path& path, const Raster& image) {
    if (image.empty()) throw InvalidArgument("cannot write an empty image");
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    PngImage png;
    png.image.width = static_cast<png_uint_32>(image.width());
    png.image.height = static_cast<png_uint_32>(image.height());
    png.image.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&png.image, path.c_str(), 0, image.data().data(), 0, nullptr)) {
        throw InputError("cannot write image " + path.string() + ": " + png.image.message);
    }
}

Raster resize_bilinear(const Raster& src, int width, int height) {
    if (width <= 0 || height <= 0) throw InvalidArgument("resize target must be non-empty");
    if (src.empty()) throw InvalidArgument("cannot resize an empty image");
    if (width == src.width() && height == src.height()) return src;

    Raster out(width, height);
    const double sx = static_cast<double>(src.width()) / width;
    const double sy = static_cast<double>(src.height()) / height;
    for (int y = 0; y < height; ++y) {
        const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, src.height() - 1.0);
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, src.height() - 1);
        const double wy = fy - y0;
        for (int x = 0; x < width; ++x) {
            const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, src.width() - 1.0);
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, src.width() - 1);
            const double wx = fx - x0;
            auto* dst = out.pixel(x, y);
            for (int c = 0; c < 3; ++c) {
                const double top = src.pixel(x0, y0)[c] * (1 - wx) + src.pixel(x1, y0)[c] * wx;
                const double bottom = src.pixel(x0, y1)[c] * (1 - wx) + src.pixel(x1, y1)[c] * wx;
                dst[c] = static_cast<std::uint8_t>(std::lround(top * (1 - wy) + bottom * wy));
            }
        }
    }
    return out;
}

}  // namespace procassess
