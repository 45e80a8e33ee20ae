/**
 * @file normalgen.hpp
 * @brief Turns target chips into "normal" background-only images.
 *
 * Two k-Means passes over pixel intensities:
 *   1. k = target_k on the chip; the brightest cluster is the target. Its
 *      pixels are refilled with draws from a Gaussian fitted to the remaining
 *      (background) pixels.
 *   2. k = shadow_k on the inverted, target-filled image; one cluster is
 *      taken as the shadow (see ShadowRule) and refilled from a Gaussian
 *      fitted to pixels outside target and shadow.
 */
#pragma once

#include "sarbench/core.hpp"
#include "sarbench/rng.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace sarbench {

struct KMeansResult {
    std::vector<double> centroids;     // ascending
    std::vector<int> assignments;      // index into centroids, per value
    double inertia = 0.0;              // sum of squared distances to assigned centroid
    int iterations = 0;                // Lloyd iterations of the winning restart
};

/// Called once per Lloyd step with the inertia of the current
/// (assignment, centroids) pair; iteration 0 is the initial assignment.
using KMeansObserver = std::function<void(int restart, int iteration, double inertia)>;

/// Lloyd's algorithm on scalars. Each restart seeds k distinct values drawn
/// uniformly without replacement from the set of distinct input values, and
/// iterates until assignments stop changing or max_iter is reached. Returns the
/// restart with the lowest inertia. Nearest-centroid ties go to the lower index.
///
/// Throws DegenerateInputError on empty input, non-finite values, or k larger
/// than the number of distinct values.
KMeansResult kmeans_1d(std::span<const double> values, int k, int n_init, int max_iter,
                       SeededRng& rng, const KMeansObserver& observer = {});

enum class ShadowRule {
    LargestCount,     // cluster with the most pixels
    HighestCentroid,  // brightest cluster of the inverted image
};

const char* to_string(ShadowRule rule) noexcept;
ShadowRule parse_shadow_rule(const std::string& name);

struct NormalGenConfig {
    int target_k = 2;
    int shadow_k = 5;
    int n_init = 5;
    int max_iter = 100;
    ShadowRule shadow_rule = ShadowRule::LargestCount;
    std::uint64_t seed = 0;

    void validate() const;
};

struct BackgroundStats {
    double mean = 0.0;
    double std = 0.0;  // sample std (n - 1); 0 when n == 1
    std::size_t pixel_count = 0;
};

/// Brightest-cluster mask. Constant images give an empty mask.
Mask segment_target(const Image& img, const NormalGenConfig& cfg, SeededRng& rng);

/// Shadow cluster of the inverted image, chosen by cfg.shadow_rule.
Mask segment_shadow(const Image& img, const NormalGenConfig& cfg, SeededRng& rng);

/// Mean and sample std of pixels outside `foreground`.
BackgroundStats background_stats(const Image& img, const Mask& foreground);

/// Region pixels replaced by Normal(mean, std) draws clamped to [0, 1], in
/// row-major order. Pixels outside the region are copied unchanged.
Image fill_from_background(const Image& img, const Mask& region, const BackgroundStats& stats,
                           SeededRng& rng);

struct NormalChip {
    Image normal;
    Mask target_mask;
    Mask shadow_mask;
};

NormalChip generate_normal_chip(const Image& img, const NormalGenConfig& cfg, SeededRng& rng);

}  // namespace sarbench
