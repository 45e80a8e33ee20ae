#pragma once

#include "sarbench/core.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace sarbench::io {

/// Decoded single-channel raster with its integer sample range.
struct GrayRaster {
    int height = 0;
    int width = 0;
    std::uint32_t maxval = 255;
    std::vector<std::uint16_t> samples;
    bool converted_from_color = false;
};

/// 8-bit interleaved RGB raster.
struct RgbRaster {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> data;  // 3 * height * width

    RgbRaster() = default;
    RgbRaster(int h, int w) : height(h), width(w), data(static_cast<std::size_t>(h) * w * 3, 0) {}

    std::uint8_t* px(int row, int col) {
        return data.data() + (static_cast<std::size_t>(row) * width + col) * 3;
    }
    const std::uint8_t* px(int row, int col) const {
        return data.data() + (static_cast<std::size_t>(row) * width + col) * 3;
    }

    friend bool operator==(const RgbRaster&, const RgbRaster&) = default;
};

bool is_supported_image(const std::filesystem::path& path);

/// PNG (8/16-bit, gray or color, optional alpha dropped) or PGM (P2/P5).
/// Color inputs are averaged to gray and flagged. Throws DecodeError.
GrayRaster read_gray(const std::filesystem::path& path);

/// Sample / maxval, no normalization.
Image to_image(const GrayRaster& raster);

/// Writes [0,1] intensities as 16-bit grayscale PNG (values clamped, rounded).
void write_png_gray16(const std::filesystem::path& path, const Image& img);

/// Writes a mask as 8-bit grayscale PNG (0 / 255).
void write_png_mask(const std::filesystem::path& path, const Mask& mask);

/// Writes an RGB raster. Text entries become tEXt chunks. Output carries no
/// timestamp, so identical inputs give identical bytes.
void write_png_rgb(const std::filesystem::path& path, const RgbRaster& raster,
                   const std::vector<std::pair<std::string, std::string>>& text = {});

}  // namespace sarbench::io
