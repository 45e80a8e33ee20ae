#include "sarbench/features.hpp"

#include "sarbench/errors.hpp"

#include <algorithm>
#include <cmath>

namespace sarbench {

namespace {

// Summed-area table over a replicate-padded plane.
class IntegralImage {
public:
    IntegralImage(int rows, int cols) : rows_(rows), cols_(cols),
        table_(static_cast<std::size_t>(rows + 1) * (cols + 1), 0.0) {}

    template <typename ValueAt>
    void build(ValueAt value_at) {
        for (int r = 0; r < rows_; ++r) {
            double row_sum = 0.0;
            for (int c = 0; c < cols_; ++c) {
                row_sum += value_at(r, c);
                cell(r + 1, c + 1) = cell(r, c + 1) + row_sum;
            }
        }
    }

    /// Sum over rows [r0, r1] x cols [c0, c1], inclusive.
    double sum(int r0, int c0, int r1, int c1) const {
        return cell(r1 + 1, c1 + 1) - cell(r0, c1 + 1) - cell(r1 + 1, c0) + cell(r0, c0);
    }

private:
    double& cell(int r, int c) { return table_[static_cast<std::size_t>(r) * (cols_ + 1) + c]; }
    double cell(int r, int c) const {
        return table_[static_cast<std::size_t>(r) * (cols_ + 1) + c];
    }

    int rows_;
    int cols_;
    std::vector<double> table_;
};

int clamp_index(int v, int n) { return std::clamp(v, 0, n - 1); }

}  // namespace

FeatureMap::FeatureMap(int channels, int grid_h, int grid_w)
    : channels_(channels), grid_h_(grid_h), grid_w_(grid_w),
      data_(static_cast<std::size_t>(channels) * grid_h * grid_w, 0.0) {
    if (channels <= 0 || grid_h <= 0 || grid_w <= 0) {
        throw ValidationError("FeatureMap dimensions must be positive");
    }
}

std::vector<double> FeatureMap::vector_at(int cell) const {
    std::vector<double> v(static_cast<std::size_t>(channels_));
    const std::size_t plane = static_cast<std::size_t>(grid_h_) * grid_w_;
    for (int ch = 0; ch < channels_; ++ch) v[ch] = data_[ch * plane + cell];
    return v;
}

int FeatureConfig::effective_select_k() const noexcept {
    return select_k.value_or(std::min(100, channel_count()));
}

void FeatureConfig::validate() const {
    if (window_sizes.empty()) throw ConfigError("features: at least one window size required");
    for (int w : window_sizes) {
        if (w < 3 || w % 2 == 0) {
            throw ConfigError("features: window sizes must be odd and >= 3, got " +
                              std::to_string(w));
        }
    }
    if (!std::is_sorted(window_sizes.begin(), window_sizes.end()) ||
        std::adjacent_find(window_sizes.begin(), window_sizes.end()) != window_sizes.end()) {
        throw ConfigError("features: window sizes must be strictly ascending");
    }
    if (stride < 1) throw ConfigError("features: stride must be >= 1");
    if (select_k && (*select_k < 1 || *select_k > channel_count())) {
        throw ConfigError("features: select_k must lie in [1, " +
                          std::to_string(channel_count()) + "]");
    }
}

int cell_center(int g, int stride, int extent) noexcept {
    return std::min(g * stride + stride / 2, extent - 1);
}

FeatureMap extract_features(const Image& img, const FeatureConfig& cfg) {
    cfg.validate();
    const int H = img.height();
    const int W = img.width();
    const int max_w = cfg.window_sizes.back();
    if (H < max_w || W < max_w) {
        throw ConfigError("features: image " + std::to_string(H) + "x" + std::to_string(W) +
                          " is smaller than the largest window " + std::to_string(max_w));
    }

    std::vector<double> grad(img.size());
    for (int r = 0; r < H; ++r) {
        for (int c = 0; c < W; ++c) {
            const double gx = 0.5 * (img.at(r, clamp_index(c + 1, W)) - img.at(r, clamp_index(c - 1, W)));
            const double gy = 0.5 * (img.at(clamp_index(r + 1, H), c) - img.at(clamp_index(r - 1, H), c));
            grad[img.index(r, c)] = std::sqrt(gx * gx + gy * gy);
        }
    }

    // Values are shifted by the first pixel before accumulation so that flat
    // regions produce exactly zero variance.
    const double shift = img.pixels()[0];
    const int pad = max_w / 2;
    const int rows = H + 2 * pad;
    const int cols = W + 2 * pad;
    auto src = [&](int pr, int pc) {
        return img.at(clamp_index(pr - pad, H), clamp_index(pc - pad, W)) - shift;
    };
    IntegralImage sum_v(rows, cols), sum_v2(rows, cols), sum_g(rows, cols);
    sum_v.build(src);
    sum_v2.build([&](int pr, int pc) {
        const double v = src(pr, pc);
        return v * v;
    });
    sum_g.build([&](int pr, int pc) {
        return grad[img.index(clamp_index(pr - pad, H), clamp_index(pc - pad, W))];
    });

    const int gh = (H + cfg.stride - 1) / cfg.stride;
    const int gw = (W + cfg.stride - 1) / cfg.stride;
    FeatureMap fm(cfg.channel_count(), gh, gw);

    for (std::size_t wi = 0; wi < cfg.window_sizes.size(); ++wi) {
        const int half = cfg.window_sizes[wi] / 2;
        const double n = static_cast<double>(cfg.window_sizes[wi]) * cfg.window_sizes[wi];
        const int ch = static_cast<int>(3 * wi);
        for (int gy = 0; gy < gh; ++gy) {
            const int pr = cell_center(gy, cfg.stride, H) + pad;
            for (int gx = 0; gx < gw; ++gx) {
                const int pc = cell_center(gx, cfg.stride, W) + pad;
                const double s1 = sum_v.sum(pr - half, pc - half, pr + half, pc + half);
                const double s2 = sum_v2.sum(pr - half, pc - half, pr + half, pc + half);
                const double sg = sum_g.sum(pr - half, pc - half, pr + half, pc + half);
                const double var = std::max(0.0, (s2 - s1 * s1 / n) / n);
                fm.at(ch, gy, gx) = shift + s1 / n;
                fm.at(ch + 1, gy, gx) = std::sqrt(var);
                fm.at(ch + 2, gy, gx) = std::max(0.0, sg / n);
            }
        }
    }
    return fm;
}

std::vector<int> draw_channels(int channels, int k, SeededRng& rng) {
    if (k < 1 || k > channels) {
        throw ConfigError("select_channels: k = " + std::to_string(k) + " not in [1, " +
                          std::to_string(channels) + "]");
    }
    std::vector<int> picked;
    for (std::size_t idx : rng.sample_without_replacement(static_cast<std::size_t>(channels),
                                                          static_cast<std::size_t>(k))) {
        picked.push_back(static_cast<int>(idx));
    }
    std::sort(picked.begin(), picked.end());
    return picked;
}

FeatureMap take_channels(const FeatureMap& fm, std::span<const int> channels) {
    FeatureMap out(static_cast<int>(channels.size()), fm.grid_h(), fm.grid_w());
    for (std::size_t i = 0; i < channels.size(); ++i) {
        const int ch = channels[i];
        if (ch < 0 || ch >= fm.channels()) throw ConfigError("take_channels: index out of range");
        for (int gy = 0; gy < fm.grid_h(); ++gy) {
            for (int gx = 0; gx < fm.grid_w(); ++gx) {
                out.at(static_cast<int>(i), gy, gx) = fm.at(ch, gy, gx);
            }
        }
    }
    return out;
}

FeatureMap select_channels(const FeatureMap& fm, int k, SeededRng& rng) {
    const auto picked = draw_channels(fm.channels(), k, rng);
    return take_channels(fm, picked);
}

}  // namespace sarbench
