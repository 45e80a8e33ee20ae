/**
 * @file core.hpp
 * @brief Pixel containers shared by every module, plus intensity preprocessing.
 *
 * Images hold dimensionless scalar intensities in row-major order. After
 * normalize_image every pixel lies in [0, 1]; most downstream operations
 * expect that range.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sarbench {

class Image {
public:
    Image() = default;

    /// Zero-filled image. Throws ValidationError on non-positive dims.
    Image(int height, int width);

    /// Throws ValidationError when pixels.size() != height*width or a pixel is non-finite.
    Image(int height, int width, std::vector<double> pixels);

    int height() const noexcept { return height_; }
    int width() const noexcept { return width_; }
    std::size_t size() const noexcept { return pixels_.size(); }
    bool empty() const noexcept { return pixels_.empty(); }

    double at(int row, int col) const { return pixels_[index(row, col)]; }
    double& at(int row, int col) { return pixels_[index(row, col)]; }

    std::span<const double> pixels() const noexcept { return pixels_; }
    std::span<double> pixels() noexcept { return pixels_; }

    std::size_t index(int row, int col) const noexcept {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(col);
    }

    friend bool operator==(const Image&, const Image&) = default;

private:
    int height_ = 0;
    int width_ = 0;
    std::vector<double> pixels_;
};

/// Boolean raster; true marks an anomalous / foreground pixel.
class Mask {
public:
    Mask() = default;
    Mask(int height, int width, bool fill = false);
    Mask(int height, int width, std::vector<std::uint8_t> bits);

    int height() const noexcept { return height_; }
    int width() const noexcept { return width_; }
    std::size_t size() const noexcept { return bits_.size(); }

    bool at(int row, int col) const { return bits_[index(row, col)] != 0; }
    void set(int row, int col, bool v) { bits_[index(row, col)] = v ? 1 : 0; }

    bool operator[](std::size_t i) const { return bits_[i] != 0; }
    void set(std::size_t i, bool v) { bits_[i] = v ? 1 : 0; }

    std::span<const std::uint8_t> bits() const noexcept { return bits_; }

    std::size_t count() const noexcept;
    bool any() const noexcept { return count() > 0; }
    bool all() const noexcept { return count() == bits_.size(); }
    bool same_shape(const Image& img) const noexcept {
        return img.height() == height_ && img.width() == width_;
    }

    Mask operator|(const Mask& other) const;
    Mask operator&(const Mask& other) const;

    friend bool operator==(const Mask&, const Mask&) = default;

private:
    std::size_t index(int row, int col) const noexcept {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(col);
    }

    int height_ = 0;
    int width_ = 0;
    std::vector<std::uint8_t> bits_;
};

/// Intersection-over-union; 1 when both masks are empty.
double iou(const Mask& a, const Mask& b);

enum class Label { Normal, Anomalous };

const char* to_string(Label label) noexcept;

struct SampleRecord {
    std::string id;
    Image image;
    Label label = Label::Normal;
    std::optional<Mask> mask;

    /// Throws ValidationError if the mask shape differs from the image, or
    /// a Normal record carries a non-empty mask.
    void validate() const;
};

/// Per-image min-max rescale to [0, 1]. A constant image maps to all zeros.
Image normalize_image(const Image& img);

/// x -> 1 - x. Requires every pixel in [0, 1].
Image invert_image(const Image& img);

}  // namespace sarbench
