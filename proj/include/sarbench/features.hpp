/**
 * @file features.hpp
 * @brief Multi-scale local statistics used as patch features.
 *
 * For every window size w (ascending) three channels are produced, in order:
 * local mean, local standard deviation (population), and mean gradient
 * magnitude. Gradients are central differences with replicate border; windows
 * reaching past the image edge read replicated border pixels.
 *
 * The feature grid has ceil(H / stride) x ceil(W / stride) cells. Cell (i, j)
 * is centered on pixel (min(i*stride + stride/2, H-1), min(j*stride + stride/2, W-1)).
 */
#pragma once

#include "sarbench/core.hpp"
#include "sarbench/rng.hpp"

#include <optional>
#include <span>
#include <vector>

namespace sarbench {

class FeatureMap {
public:
    FeatureMap() = default;
    FeatureMap(int channels, int grid_h, int grid_w);

    int channels() const noexcept { return channels_; }
    int grid_h() const noexcept { return grid_h_; }
    int grid_w() const noexcept { return grid_w_; }
    int cells() const noexcept { return grid_h_ * grid_w_; }

    double at(int ch, int gy, int gx) const { return data_[offset(ch, gy, gx)]; }
    double& at(int ch, int gy, int gx) { return data_[offset(ch, gy, gx)]; }

    /// Feature vector of cell `cell` (row-major cell index), gathered across channels.
    std::vector<double> vector_at(int cell) const;

    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }

    bool same_shape(const FeatureMap& o) const noexcept {
        return channels_ == o.channels_ && grid_h_ == o.grid_h_ && grid_w_ == o.grid_w_;
    }

    friend bool operator==(const FeatureMap&, const FeatureMap&) = default;

private:
    std::size_t offset(int ch, int gy, int gx) const noexcept {
        return (static_cast<std::size_t>(ch) * grid_h_ + gy) * grid_w_ + gx;
    }

    int channels_ = 0;
    int grid_h_ = 0;
    int grid_w_ = 0;
    std::vector<double> data_;  // C x grid_h x grid_w
};

struct FeatureConfig {
    std::vector<int> window_sizes{3, 7, 15};
    int stride = 4;
    /// Channels kept by random selection; nullopt means min(100, C).
    std::optional<int> select_k;

    int channel_count() const noexcept { return 3 * static_cast<int>(window_sizes.size()); }
    int effective_select_k() const noexcept;
    void validate() const;
};

/// Center pixel coordinate of grid index `g` along an axis of length `extent`.
int cell_center(int g, int stride, int extent) noexcept;

FeatureMap extract_features(const Image& img, const FeatureConfig& cfg);

/// k distinct channel indices drawn uniformly, sorted ascending.
std::vector<int> draw_channels(int channels, int k, SeededRng& rng);

/// Keeps the listed channels, in the given order.
FeatureMap take_channels(const FeatureMap& fm, std::span<const int> channels);

/// draw_channels + take_channels.
FeatureMap select_channels(const FeatureMap& fm, int k, SeededRng& rng);

}  // namespace sarbench
