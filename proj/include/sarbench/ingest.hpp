/**
 * @file ingest.hpp
 * @brief Loads user datasets from a fixed directory layout.
 *
 *   <root>/train/normal/<name>.png|pgm           normal training images (required)
 *   <root>/test/normal/<name>.png|pgm            normal test images
 *   <root>/test/anomalous/<name>.png|pgm         anomalous test images
 *   <root>/ground_truth/anomalous/<stem>.png  mask for test/anomalous/<stem>.*
 *
 * Images are converted to grayscale and min-max normalized per image. Masks are
 * binarized at half of their format's sample range. Records are ordered by
 * file name.
 */
#pragma once

#include "sarbench/dataset.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace sarbench {

DatasetSplit load_dataset(const std::filesystem::path& root);

/// Human-readable problems with the layout; empty when valid.
std::vector<std::string> validate_layout(const std::filesystem::path& root);

/// Loads one image file as a normalized grayscale Image.
Image load_image(const std::filesystem::path& path);

/// Loads a mask file, binarized at half of its sample range.
Mask load_mask(const std::filesystem::path& path);

}  // namespace sarbench
