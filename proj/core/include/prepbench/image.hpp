#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prepbench/error.hpp"

namespace prepbench {

/// 8-bit raster, 1 (gray) or 3 (RGB) interleaved channels, row-major.
struct ImageBuffer {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<std::uint8_t> pixels;

    std::size_t pixel_count() const { return pixels.size(); }
    bool is_gray() const { return channels == 1; }

    std::uint8_t at(int x, int y, int c = 0) const {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    std::uint8_t& at(int x, int y, int c = 0) {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }

    bool operator==(const ImageBuffer&) const = default;
};

ImageBuffer make_image(int width, int height, int channels, std::uint8_t fill = 0);

/// Project-wide rounding rule: half away from zero.
long round_half_away(double v);

/// Clamp-and-round a real intensity into [0,255].
std::uint8_t clamp_u8(double v);

// Binary netpbm I/O. P5 = gray, P6 = RGB, maxval must be 255.
ImageBuffer read_image(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> write_image(const ImageBuffer& img);

ImageBuffer read_image_file(const std::string& path);
void write_image_file(const ImageBuffer& img, const std::string& path);

/// BT.601 luma: Y = round(0.299 R + 0.587 G + 0.114 B).
ImageBuffer rgb_to_gray(const ImageBuffer& img);

/// Bilinear resize with pixel-center mapping and edge clamping.
ImageBuffer resize_bilinear(const ImageBuffer& img, int out_w, int out_h);

} // namespace prepbench
