#include "sarbench/visualize.hpp"

#include "sarbench/errors.hpp"
#include "viridis.hpp"

#include <algorithm>
#include <cmath>

namespace sarbench {

namespace {

std::uint8_t to_byte(double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
}

io::RgbRaster gray_raster(const Image& img) {
    io::RgbRaster out(img.height(), img.width());
    for (int r = 0; r < img.height(); ++r) {
        for (int c = 0; c < img.width(); ++c) {
            const std::uint8_t g = to_byte(img.at(r, c) * 255.0);
            auto* p = out.px(r, c);
            p[0] = p[1] = p[2] = g;
        }
    }
    return out;
}

io::RgbRaster mask_raster(const Mask& mask) {
    io::RgbRaster out(mask.height(), mask.width());
    for (int r = 0; r < mask.height(); ++r) {
        for (int c = 0; c < mask.width(); ++c) {
            const std::uint8_t g = mask.at(r, c) ? 255 : 0;
            auto* p = out.px(r, c);
            p[0] = p[1] = p[2] = g;
        }
    }
    return out;
}

}  // namespace

std::array<std::uint8_t, 3> colormap(double t) {
    const double clamped = std::isfinite(t) ? std::clamp(t, 0.0, 1.0) : 0.0;
    const auto idx = static_cast<std::size_t>(std::lround(clamped * 255.0));
    return detail::kViridis[idx];
}

io::RgbRaster render_heatmap(const Image& map, std::optional<DisplayRange> range) {
    const auto px = map.pixels();
    double lo = 0.0, hi = 0.0;
    if (range) {
        lo = range->lo;
        hi = range->hi;
    } else if (!px.empty()) {
        const auto [mn, mx] = std::minmax_element(px.begin(), px.end());
        lo = *mn;
        hi = *mx;
    }
    const double span = hi - lo;
    io::RgbRaster out(map.height(), map.width());
    for (int r = 0; r < map.height(); ++r) {
        for (int c = 0; c < map.width(); ++c) {
            const double t = span > 0.0 ? (map.at(r, c) - lo) / span : 0.0;
            const auto rgb = colormap(t);
            std::copy(rgb.begin(), rgb.end(), out.px(r, c));
        }
    }
    return out;
}

Panel render_panel(const SampleRecord& sample, const Image& map, double threshold,
                   std::optional<DisplayRange> range) {
    if (map.height() != sample.image.height() || map.width() != sample.image.width()) {
        throw ValidationError("render_panel: map and image dimensions differ for '" + sample.id +
                              "'");
    }
    Panel panel;
    panel.cells.push_back({"Input Image", gray_raster(sample.image)});
    if (sample.mask) {
        if (!sample.mask->same_shape(sample.image)) {
            throw ValidationError("render_panel: mask dimensions differ for '" + sample.id + "'");
        }
        panel.cells.push_back({"Ground Truth", mask_raster(*sample.mask)});
    }

    Mask predicted(map.height(), map.width());
    const auto scores = map.pixels();
    for (std::size_t i = 0; i < scores.size(); ++i) predicted.set(i, scores[i] >= threshold);
    panel.cells.push_back({"Predicted Mask", mask_raster(predicted)});

    const io::RgbRaster heat = render_heatmap(map, range);
    const io::RgbRaster input = gray_raster(sample.image);
    io::RgbRaster overlay(map.height(), map.width());
    for (std::size_t i = 0; i < overlay.data.size(); ++i) {
        overlay.data[i] = to_byte(kOverlayInputWeight * input.data[i] +
                                  (1.0 - kOverlayInputWeight) * heat.data[i]);
    }
    panel.cells.push_back({"Detection Output", std::move(overlay)});
    return panel;
}

io::RgbRaster Panel::compose() const {
    if (cells.empty()) return {};
    const int h = cells.front().raster.height;
    const int cw = cells.front().raster.width;
    for (const auto& cell : cells) {
        if (cell.raster.height != h || cell.raster.width != cw) {
            throw ValidationError("panel cells differ in size");
        }
    }
    const int n = static_cast<int>(cells.size());
    io::RgbRaster out(h, n * cw + (n - 1) * kPanelGap);
    for (int k = 0; k < n; ++k) {
        const int x0 = k * (cw + kPanelGap);
        for (int r = 0; r < h; ++r) {
            std::copy_n(cells[k].raster.px(r, 0), cw * 3, out.px(r, x0));
        }
    }
    return out;
}

std::filesystem::path write_panel(const Panel& panel, const std::filesystem::path& dir,
                                  const std::string& sample_id, const std::string& model) {
    std::string captions;
    for (const auto& cell : panel.cells) {
        if (!captions.empty()) captions += " | ";
        captions += cell.caption;
    }
    const auto path = dir / (sample_id + "_" + model + ".png");
    io::write_png_rgb(path, panel.compose(), {{"Title", sample_id + " / " + model},
                                              {"Description", captions}});
    return path;
}

}  // namespace sarbench
