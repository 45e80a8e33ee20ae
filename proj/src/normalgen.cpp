#include "sarbench/normalgen.hpp"

#include "sarbench/errors.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>

namespace sarbench {

namespace {

std::size_t count_distinct(std::span<const double> values) {
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
}

// k-Means over the image pixels with k clamped to the number of distinct
// levels. Returns nullopt for a constant image.
std::optional<KMeansResult> cluster_pixels(const Image& img, int k, const NormalGenConfig& cfg,
                                           SeededRng& rng, const char* what) {
    const std::size_t distinct = count_distinct(img.pixels());
    if (distinct < 2) {
        spdlog::warn("{}: constant image, nothing to segment", what);
        return std::nullopt;
    }
    int k_eff = k;
    if (static_cast<std::size_t>(k) > distinct) {
        k_eff = static_cast<int>(distinct);
        spdlog::warn("{}: only {} intensity levels, using k = {} instead of {}", what, distinct,
                     k_eff, k);
    }
    return kmeans_1d(img.pixels(), k_eff, cfg.n_init, cfg.max_iter, rng);
}

Mask cluster_mask(const Image& img, const KMeansResult& km, int cluster) {
    Mask mask(img.height(), img.width());
    for (std::size_t i = 0; i < km.assignments.size(); ++i) mask.set(i, km.assignments[i] == cluster);
    return mask;
}

}  // namespace

const char* to_string(ShadowRule rule) noexcept {
    return rule == ShadowRule::LargestCount ? "largest" : "darkest";
}

ShadowRule parse_shadow_rule(const std::string& name) {
    if (name == "largest" || name == "largest_count") return ShadowRule::LargestCount;
    if (name == "darkest" || name == "highest_centroid") return ShadowRule::HighestCentroid;
    throw ConfigError("unknown shadow rule '" + name + "' (expected largest|darkest)");
}

void NormalGenConfig::validate() const {
    if (target_k < 2 || shadow_k < 2) throw ConfigError("normalgen: cluster counts must be >= 2");
    if (n_init < 1 || max_iter < 1) throw ConfigError("normalgen: n_init and max_iter must be >= 1");
}

Mask segment_target(const Image& img, const NormalGenConfig& cfg, SeededRng& rng) {
    cfg.validate();
    const auto km = cluster_pixels(img, cfg.target_k, cfg, rng, "segment_target");
    if (!km) return Mask(img.height(), img.width());
    // SAR targets are bright: foreground is the highest centroid.
    return cluster_mask(img, *km, static_cast<int>(km->centroids.size()) - 1);
}

Mask segment_shadow(const Image& img, const NormalGenConfig& cfg, SeededRng& rng) {
    cfg.validate();
    const Image inverted = invert_image(img);
    const auto km = cluster_pixels(inverted, cfg.shadow_k, cfg, rng, "segment_shadow");
    if (!km) return Mask(img.height(), img.width());

    const int k = static_cast<int>(km->centroids.size());
    int chosen = k - 1;
    if (cfg.shadow_rule == ShadowRule::LargestCount) {
        std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
        for (int a : km->assignments) ++counts[static_cast<std::size_t>(a)];
        chosen = static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    }
    return cluster_mask(img, *km, chosen);
}

BackgroundStats background_stats(const Image& img, const Mask& foreground) {
    if (!foreground.same_shape(img)) throw ValidationError("background_stats: shape mismatch");
    const auto px = img.pixels();
    BackgroundStats stats;
    double sum = 0.0;
    for (std::size_t i = 0; i < px.size(); ++i) {
        if (!foreground[i]) {
            sum += px[i];
            ++stats.pixel_count;
        }
    }
    if (stats.pixel_count == 0) throw DegenerateInputError("no background pixels");
    stats.mean = sum / static_cast<double>(stats.pixel_count);
    if (stats.pixel_count > 1) {
        double ss = 0.0;
        for (std::size_t i = 0; i < px.size(); ++i) {
            if (!foreground[i]) {
                const double d = px[i] - stats.mean;
                ss += d * d;
            }
        }
        stats.std = std::sqrt(ss / static_cast<double>(stats.pixel_count - 1));
    }
    return stats;
}

Image fill_from_background(const Image& img, const Mask& region, const BackgroundStats& stats,
                           SeededRng& rng) {
    if (!region.same_shape(img)) throw ValidationError("fill_from_background: shape mismatch");
    Image out = img;
    auto px = out.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) {
        if (region[i]) px[i] = std::clamp(rng.normal(stats.mean, stats.std), 0.0, 1.0);
    }
    return out;
}

NormalChip generate_normal_chip(const Image& img, const NormalGenConfig& cfg, SeededRng& rng) {
    NormalChip chip;
    chip.target_mask = segment_target(img, cfg, rng);
    const Image target_filled =
        fill_from_background(img, chip.target_mask, background_stats(img, chip.target_mask), rng);

    chip.shadow_mask = segment_shadow(target_filled, cfg, rng);
    const Mask removed = chip.target_mask | chip.shadow_mask;
    chip.normal = fill_from_background(target_filled, chip.shadow_mask,
                                       background_stats(target_filled, removed), rng);
    return chip;
}

}  // namespace sarbench
