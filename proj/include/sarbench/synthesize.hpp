/**
 * @file synthesize.hpp
 * @brief Synthetic SAR-like chips with exact pixel ground truth.
 *
 * Clutter model, per pixel:
 *   base    ~ Normal(background_mean, background_std), clamped to (0, 1]
 *   base   += intensity_boost                    inside the target ellipse
 *   value   = base * Gamma(L, 1/L)               unit-mean L-look speckle
 *   value  *= (1 - attenuation)                  inside the shadow ellipse
 * The result is min-max normalized. The shadow mask excludes target pixels.
 */
#pragma once

#include "sarbench/core.hpp"
#include "sarbench/dataset.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sarbench {

struct TargetSpec {
    double center_row = 0.0;
    double center_col = 0.0;
    double semi_axis_row = 1.0;
    double semi_axis_col = 1.0;
    double intensity_boost = 0.0;
};

struct ShadowSpec {
    double offset_row = 0.0;
    double offset_col = 0.0;
    double attenuation = 0.0;  // in [0, 1)
};

struct SceneConfig {
    int height = 64;
    int width = 64;
    double background_mean = 0.3;
    double background_std = 0.05;
    int speckle_looks = 4;
    std::optional<TargetSpec> target;
    std::optional<ShadowSpec> shadow;  // shares the target's semi-axes
    std::uint64_t seed = 0;

    /// Throws ConfigError on invalid values or ellipses leaving the image.
    void validate() const;
};

struct SynthSample {
    Image image;  // normalized
    Image raw;    // speckled intensities before normalization
    Mask truth_target;
    Mask truth_shadow;
    SceneConfig config;
};

SynthSample gen_scene(const SceneConfig& cfg);

/// Ranges for the targets planted in anomalous samples of gen_dataset.
/// Semi-axes are drawn uniformly per sample; centers uniformly among
/// positions that keep target and shadow inside the image.
struct AnomalyRanges {
    double semi_axis_min = 4.0;
    double semi_axis_max = 8.0;
    double intensity_boost = 1.5;
    /// Shadow offset expressed in multiples of the row semi-axis (down-range).
    std::optional<double> shadow_offset_factor = 1.6;
    double shadow_attenuation = 0.9;
};

/// Normal samples are pure clutter; anomalous samples carry a target (and a
/// shadow when configured) with mask = target | shadow. Per-sample seeds are
/// derive_seed(seed, global index) in the order train, test-normal, test-anomalous.
DatasetSplit gen_dataset(int n_train_normal, int n_test_normal, int n_test_anom,
                         const SceneConfig& base_cfg, std::uint64_t seed,
                         const AnomalyRanges& ranges = {});

/// Writes a split in the directory layout read by load_dataset (16-bit PNG).
void export_dataset(const DatasetSplit& split, const std::filesystem::path& root);

}  // namespace sarbench
