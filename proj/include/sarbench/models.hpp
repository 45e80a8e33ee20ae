/**
 * @file models.hpp
 * @brief Training-free anomaly models over feature maps.
 *
 * PaDiM-style Gaussian field: one multivariate Gaussian per grid cell,
 * covariance regularized by epsilon * I, scored with the Mahalanobis distance
 * through the stored Cholesky factor.
 *
 * DFM-style PCA model: principal subspace of all training cell vectors pooled
 * together, scored with the squared residual outside that subspace.
 */
#pragma once

#include "sarbench/features.hpp"
#include "sarbench/linalg.hpp"

#include <span>
#include <string>
#include <vector>

namespace sarbench {

inline constexpr double kDefaultCovarianceEpsilon = 0.01;
inline constexpr double kDefaultRetainedVariance = 0.97;
inline constexpr double kDefaultSmoothingSigma = 4.0;

/// Row-major grid of per-cell scores.
struct ScoreGrid {
    int grid_h = 0;
    int grid_w = 0;
    std::vector<double> values;

    double at(int gy, int gx) const { return values[static_cast<std::size_t>(gy) * grid_w + gx]; }
};

struct GaussianField {
    int channels = 0;
    int grid_h = 0;
    int grid_w = 0;
    double epsilon = kDefaultCovarianceEpsilon;
    std::vector<std::vector<double>> means;          // per cell, length C
    std::vector<linalg::SquareMatrix> covariances;   // per cell, regularized
    std::vector<linalg::SquareMatrix> cholesky;      // per cell, lower factor
};

GaussianField padim_fit(std::span<const FeatureMap> train,
                        double epsilon = kDefaultCovarianceEpsilon);

ScoreGrid padim_score(const GaussianField& field, const FeatureMap& fm);

struct PcaModel {
    std::vector<double> mean;             // length C
    std::vector<std::vector<double>> axes;  // r orthonormal axes, each length C
    std::vector<double> eigenvalues;      // all C, descending
    double retained_ratio = kDefaultRetainedVariance;

    int channels() const noexcept { return static_cast<int>(mean.size()); }
    int rank() const noexcept { return static_cast<int>(axes.size()); }
};

/// Axis signs are fixed so the largest-magnitude entry is positive.
PcaModel dfm_fit(std::span<const FeatureMap> train, double retained_ratio = kDefaultRetainedVariance);

/// Same, from an explicit set of sample vectors (rows).
PcaModel pca_fit(std::span<const std::vector<double>> samples, double retained_ratio);

ScoreGrid dfm_score(const PcaModel& model, const FeatureMap& fm);

/// Squared residual of a single vector outside the model subspace.
double pca_residual(const PcaModel& model, std::span<const double> x);

struct AnomalyMap {
    std::string id;
    Image scores;  // full resolution, all >= 0
};

/// Bilinear upsampling (half-pixel centers, clamped) to height x width, then a
/// separable Gaussian blur with the given sigma, truncated at 4 sigma,
/// replicate border.
Image postprocess_map(const ScoreGrid& grid, int height, int width,
                      double sigma = kDefaultSmoothingSigma);

Image bilinear_upsample(const ScoreGrid& grid, int height, int width);
Image gaussian_blur(const Image& img, double sigma);

/// Maximum pixel of the map.
double image_score(const Image& map);

}  // namespace sarbench
