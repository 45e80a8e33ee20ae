#include "sarbench/synthesize.hpp"

#include "sarbench/errors.hpp"
#include "sarbench/image_io.hpp"
#include "sarbench/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace sarbench {

namespace fs = std::filesystem;

namespace {

constexpr double kClutterFloor = 1e-6;

bool inside_ellipse(int row, int col, double cr, double cc, double ar, double ac) {
    const double dr = (row - cr) / ar;
    const double dc = (col - cc) / ac;
    return dr * dr + dc * dc <= 1.0;
}

void require_ellipse_inside(const char* what, double cr, double cc, double ar, double ac,
                            int height, int width) {
    if (!(ar > 0.0 && ac > 0.0)) {
        throw ConfigError(std::string(what) + " semi-axes must be positive");
    }
    if (cr - ar < 0.0 || cr + ar > height - 1 || cc - ac < 0.0 || cc + ac > width - 1) {
        throw ConfigError(std::string(what) + " ellipse leaves the " + std::to_string(height) +
                          "x" + std::to_string(width) + " image");
    }
}

std::string sample_id(const char* prefix, int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s_%04d", prefix, index);
    return buf;
}

}  // namespace

void SceneConfig::validate() const {
    if (height <= 0 || width <= 0) throw ConfigError("scene dimensions must be positive");
    if (!(background_mean > 0.0 && background_mean < 1.0)) {
        throw ConfigError("background_mean must lie in (0, 1)");
    }
    if (!(background_std >= 0.0) || !std::isfinite(background_std)) {
        throw ConfigError("background_std must be >= 0");
    }
    if (speckle_looks < 1) throw ConfigError("speckle_looks must be >= 1");
    if (shadow && !target) throw ConfigError("a shadow requires a target");
    if (target) {
        if (!(target->intensity_boost >= 0.0)) throw ConfigError("intensity_boost must be >= 0");
        require_ellipse_inside("target", target->center_row, target->center_col,
                               target->semi_axis_row, target->semi_axis_col, height, width);
    }
    if (shadow) {
        if (!(shadow->attenuation >= 0.0 && shadow->attenuation < 1.0)) {
            throw ConfigError("shadow attenuation must lie in [0, 1)");
        }
        require_ellipse_inside("shadow", target->center_row + shadow->offset_row,
                               target->center_col + shadow->offset_col, target->semi_axis_row,
                               target->semi_axis_col, height, width);
    }
}

SynthSample gen_scene(const SceneConfig& cfg) {
    cfg.validate();
    SeededRng rng(cfg.seed);

    SynthSample out;
    out.config = cfg;
    out.truth_target = Mask(cfg.height, cfg.width);
    out.truth_shadow = Mask(cfg.height, cfg.width);

    for (int r = 0; r < cfg.height; ++r) {
        for (int c = 0; c < cfg.width; ++c) {
            const bool in_target =
                cfg.target && inside_ellipse(r, c, cfg.target->center_row, cfg.target->center_col,
                                             cfg.target->semi_axis_row, cfg.target->semi_axis_col);
            const bool in_shadow =
                !in_target && cfg.shadow &&
                inside_ellipse(r, c, cfg.target->center_row + cfg.shadow->offset_row,
                               cfg.target->center_col + cfg.shadow->offset_col,
                               cfg.target->semi_axis_row, cfg.target->semi_axis_col);
            out.truth_target.set(r, c, in_target);
            out.truth_shadow.set(r, c, in_shadow);
        }
    }

    std::vector<double> raw(static_cast<std::size_t>(cfg.height) * cfg.width);
    const double looks = static_cast<double>(cfg.speckle_looks);
    for (std::size_t i = 0; i < raw.size(); ++i) {
        double base = std::clamp(rng.normal(cfg.background_mean, cfg.background_std),
                                 kClutterFloor, 1.0);
        if (out.truth_target[i]) base += cfg.target->intensity_boost;
        double value = base * rng.gamma(looks, 1.0 / looks);
        if (out.truth_shadow[i]) value *= 1.0 - cfg.shadow->attenuation;
        raw[i] = value;
    }
    out.raw = Image(cfg.height, cfg.width, std::move(raw));
    out.image = normalize_image(out.raw);
    return out;
}

DatasetSplit gen_dataset(int n_train_normal, int n_test_normal, int n_test_anom,
                         const SceneConfig& base_cfg, std::uint64_t seed,
                         const AnomalyRanges& ranges) {
    if (n_train_normal < 0 || n_test_normal < 0 || n_test_anom < 0) {
        throw ConfigError("gen_dataset: sample counts must be >= 0");
    }
    if (!(ranges.semi_axis_min > 0.0 && ranges.semi_axis_min <= ranges.semi_axis_max)) {
        throw ConfigError("gen_dataset: invalid semi-axis range");
    }

    SceneConfig normal_cfg = base_cfg;
    normal_cfg.target.reset();
    normal_cfg.shadow.reset();
    normal_cfg.validate();

    DatasetSplit split;
    split.name = "synthetic";
    std::uint64_t index = 0;

    auto make_normal = [&](const char* prefix, int i) {
        SceneConfig cfg = normal_cfg;
        cfg.seed = derive_seed(seed, index++);
        SynthSample s = gen_scene(cfg);
        SampleRecord rec;
        rec.id = sample_id(prefix, i);
        rec.image = std::move(s.image);
        rec.label = Label::Normal;
        rec.mask = Mask(cfg.height, cfg.width);
        return rec;
    };

    for (int i = 0; i < n_train_normal; ++i) split.train.push_back(make_normal("train_normal", i));
    for (int i = 0; i < n_test_normal; ++i) split.test.push_back(make_normal("test_normal", i));

    for (int i = 0; i < n_test_anom; ++i) {
        SceneConfig cfg = normal_cfg;
        cfg.seed = derive_seed(seed, index++);
        // Geometry draws use a stream separate from the pixel noise.
        SeededRng geo(derive_seed(cfg.seed, 0x6e6f6d65ULL));

        const double span = ranges.semi_axis_max - ranges.semi_axis_min;
        TargetSpec t;
        t.semi_axis_row = ranges.semi_axis_min + span * geo.uniform();
        t.semi_axis_col = ranges.semi_axis_min + span * geo.uniform();
        t.intensity_boost = ranges.intensity_boost;

        double off_row = 0.0;
        if (ranges.shadow_offset_factor) off_row = *ranges.shadow_offset_factor * t.semi_axis_row;

        // Inset keeps rounding in the interpolation below from touching the border.
        constexpr double inset = 1e-6;
        const double row_lo = t.semi_axis_row + std::max(0.0, -off_row) + inset;
        const double row_hi = (cfg.height - 1) - t.semi_axis_row - std::max(0.0, off_row) - inset;
        const double col_lo = t.semi_axis_col + inset;
        const double col_hi = (cfg.width - 1) - t.semi_axis_col - inset;
        if (row_lo > row_hi || col_lo > col_hi) {
            throw ConfigError("gen_dataset: target ranges do not fit a " +
                              std::to_string(cfg.height) + "x" + std::to_string(cfg.width) +
                              " scene");
        }
        t.center_row = row_lo + (row_hi - row_lo) * geo.uniform();
        t.center_col = col_lo + (col_hi - col_lo) * geo.uniform();
        cfg.target = t;
        if (ranges.shadow_offset_factor) {
            cfg.shadow = ShadowSpec{off_row, 0.0, ranges.shadow_attenuation};
        }

        SynthSample s = gen_scene(cfg);
        SampleRecord rec;
        rec.id = sample_id("test_anomalous", i);
        rec.image = std::move(s.image);
        rec.label = Label::Anomalous;
        rec.mask = s.truth_target | s.truth_shadow;
        split.test.push_back(std::move(rec));
    }
    return split;
}

void export_dataset(const DatasetSplit& split, const fs::path& root) {
    std::error_code ec;
    for (const char* sub : {"train/normal", "test/normal", "test/anomalous",
                            "ground_truth/anomalous"}) {
        fs::create_directories(root / sub, ec);
        if (ec) throw IoError("cannot create " + (root / sub).string() + ": " + ec.message());
    }
    for (const auto& rec : split.train) {
        io::write_png_gray16(root / "train" / "normal" / (rec.id + ".png"), rec.image);
    }
    for (const auto& rec : split.test) {
        if (rec.label == Label::Normal) {
            io::write_png_gray16(root / "test" / "normal" / (rec.id + ".png"), rec.image);
        } else {
            io::write_png_gray16(root / "test" / "anomalous" / (rec.id + ".png"), rec.image);
            if (rec.mask) {
                io::write_png_mask(root / "ground_truth" / "anomalous" / (rec.id + ".png"),
                                   *rec.mask);
            }
        }
    }
}

}  // namespace sarbench
