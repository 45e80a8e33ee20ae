#include "sarbench/core.hpp"

#include "sarbench/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sarbench {

namespace {

void require_dims(int height, int width) {
    if (height <= 0 || width <= 0) {
        throw ValidationError("image dimensions must be positive, got " +
                              std::to_string(height) + "x" + std::to_string(width));
    }
}

// Multiples of 2^-53 in [0, 1] make 1 - x exact, so inversion is a bit-exact
// involution on normalized images.
double snap_unit(double y) { return std::nearbyint(y * 0x1p53) * 0x1p-53; }

}  // namespace

Image::Image(int height, int width) : height_(height), width_(width) {
    require_dims(height, width);
    pixels_.assign(static_cast<std::size_t>(height) * static_cast<std::size_t>(width), 0.0);
}

Image::Image(int height, int width, std::vector<double> pixels)
    : height_(height), width_(width), pixels_(std::move(pixels)) {
    require_dims(height, width);
    if (pixels_.size() != static_cast<std::size_t>(height) * static_cast<std::size_t>(width)) {
        throw ValidationError("pixel count " + std::to_string(pixels_.size()) +
                              " does not match " + std::to_string(height) + "x" +
                              std::to_string(width));
    }
    for (std::size_t i = 0; i < pixels_.size(); ++i) {
        if (!std::isfinite(pixels_[i])) {
            throw ValidationError("non-finite pixel at index " + std::to_string(i));
        }
    }
}

Mask::Mask(int height, int width, bool fill) : height_(height), width_(width) {
    require_dims(height, width);
    bits_.assign(static_cast<std::size_t>(height) * static_cast<std::size_t>(width),
                 fill ? 1 : 0);
}

Mask::Mask(int height, int width, std::vector<std::uint8_t> bits)
    : height_(height), width_(width), bits_(std::move(bits)) {
    require_dims(height, width);
    if (bits_.size() != static_cast<std::size_t>(height) * static_cast<std::size_t>(width)) {
        throw ValidationError("mask bit count does not match its dimensions");
    }
    for (auto& b : bits_) b = b ? 1 : 0;
}

std::size_t Mask::count() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

Mask Mask::operator|(const Mask& other) const {
    if (other.height_ != height_ || other.width_ != width_) {
        throw ValidationError("mask union: shape mismatch");
    }
    Mask out = *this;
    for (std::size_t i = 0; i < bits_.size(); ++i) out.bits_[i] = bits_[i] | other.bits_[i];
    return out;
}

Mask Mask::operator&(const Mask& other) const {
    if (other.height_ != height_ || other.width_ != width_) {
        throw ValidationError("mask intersection: shape mismatch");
    }
    Mask out = *this;
    for (std::size_t i = 0; i < bits_.size(); ++i) out.bits_[i] = bits_[i] & other.bits_[i];
    return out;
}

double iou(const Mask& a, const Mask& b) {
    const std::size_t inter = (a & b).count();
    const std::size_t uni = (a | b).count();
    if (uni == 0) return 1.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

const char* to_string(Label label) noexcept {
    return label == Label::Normal ? "normal" : "anomalous";
}

void SampleRecord::validate() const {
    if (!mask) return;
    if (!mask->same_shape(image)) {
        throw ValidationError("sample '" + id + "': mask " + std::to_string(mask->height()) +
                              "x" + std::to_string(mask->width()) + " does not match image " +
                              std::to_string(image.height()) + "x" +
                              std::to_string(image.width()));
    }
    if (label == Label::Normal && mask->any()) {
        throw ValidationError("sample '" + id + "': normal record carries a non-empty mask");
    }
}

Image normalize_image(const Image& img) {
    const auto px = img.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) {
        if (!std::isfinite(px[i])) {
            throw ValidationError("normalize_image: non-finite pixel at index " +
                                  std::to_string(i));
        }
    }
    Image out(img.height(), img.width());
    if (px.empty()) return out;
    const auto [lo_it, hi_it] = std::minmax_element(px.begin(), px.end());
    const double lo = *lo_it;
    const double range = *hi_it - lo;
    if (range == 0.0) return out;
    auto dst = out.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) {
        dst[i] = std::clamp(snap_unit((px[i] - lo) / range), 0.0, 1.0);
    }
    return out;
}

Image invert_image(const Image& img) {
    Image out(img.height(), img.width());
    const auto src = img.pixels();
    auto dst = out.pixels();
    for (std::size_t i = 0; i < src.size(); ++i) {
        if (!(src[i] >= 0.0 && src[i] <= 1.0)) {
            throw ValidationError("invert_image: pixel " + std::to_string(i) +
                                  " outside [0, 1]");
        }
        dst[i] = 1.0 - src[i];
    }
    return out;
}

}  // namespace sarbench
