#pragma once

#include "sarbench/core.hpp"
#include "sarbench/image_io.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sarbench {

/// Overlay = kOverlayInputWeight * input + (1 - kOverlayInputWeight) * heatmap.
inline constexpr double kOverlayInputWeight = 0.6;

/// Fixed display range for cross-image comparison; default is per-map min-max.
struct DisplayRange {
    double lo = 0.0;
    double hi = 1.0;
};

/// Viridis lookup; t is clamped to [0, 1] and rounded to one of 256 entries.
std::array<std::uint8_t, 3> colormap(double t);

/// Constant maps render as the low end of the colormap.
io::RgbRaster render_heatmap(const Image& map, std::optional<DisplayRange> range = {});

struct PanelCell {
    std::string caption;
    io::RgbRaster raster;
};

/// Input, ground truth (when the sample has a mask), predicted mask, overlay.
struct Panel {
    std::vector<PanelCell> cells;

    /// Cells side by side, separated by kPanelGap black columns.
    io::RgbRaster compose() const;
};

inline constexpr int kPanelGap = 2;

Panel render_panel(const SampleRecord& sample, const Image& map, double threshold,
                   std::optional<DisplayRange> range = {});

/// Writes `<dir>/<sample_id>_<model>.png` and returns the path.
std::filesystem::path write_panel(const Panel& panel, const std::filesystem::path& dir,
                                  const std::string& sample_id, const std::string& model);

}  // namespace sarbench
