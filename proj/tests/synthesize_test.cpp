#include "sarbench/errors.hpp"
#include "sarbench/ingest.hpp"
#include "sarbench/synthesize.hpp"

#include "support.hpp"

#include <cmath>
#include <numeric>

using namespace sarbench;
using sarbench::testing::TempDir;

namespace {

SceneConfig planted(std::uint64_t seed, double boost = 0.5) {
    SceneConfig cfg;
    cfg.target = TargetSpec{30.0, 32.0, 6.0, 5.0, boost};
    cfg.shadow = ShadowSpec{10.0, 0.0, 0.9};
    cfg.seed = seed;
    return cfg;
}

double masked_mean(const Image& img, const Mask& m, bool inside) {
    double s = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < img.size(); ++i) {
        if (m[i] == inside) {
            s += img.pixels()[i];
            ++n;
        }
    }
    return s / static_cast<double>(n);
}

}  // namespace

TEST(GenScene, NoTargetMeansEmptyTruth) {
    SceneConfig cfg;
    cfg.seed = 3;
    const SynthSample s = gen_scene(cfg);
    EXPECT_FALSE(s.truth_target.any());
    EXPECT_FALSE(s.truth_shadow.any());
    EXPECT_EQ(s.image.height(), 64);
    for (double p : s.image.pixels()) {
        ASSERT_GE(p, 0.0);
        ASSERT_LE(p, 1.0);
    }
}

TEST(GenScene, SameSeedIsBitIdentical) {
    const SynthSample a = gen_scene(planted(9));
    const SynthSample b = gen_scene(planted(9));
    EXPECT_EQ(a.image, b.image);
    EXPECT_EQ(a.raw, b.raw);
    EXPECT_EQ(a.truth_target, b.truth_target);
    EXPECT_NE(gen_scene(planted(10)).image, a.image);
}

TEST(GenScene, TargetBrighterThanBackgroundOver100Seeds) {
    int brighter = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        SceneConfig cfg;
        cfg.target = TargetSpec{32.0, 32.0, 6.0, 6.0, 0.5};
        cfg.seed = seed;
        const SynthSample s = gen_scene(cfg);
        const Mask bg = s.truth_target | s.truth_shadow;
        if (masked_mean(s.image, s.truth_target, true) > masked_mean(s.image, bg, false)) ++brighter;
    }
    EXPECT_GE(brighter, 99);
}

TEST(GenScene, MasksAreDisjointAndExactEllipses) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const SynthSample s = gen_scene(planted(seed));
        ASSERT_FALSE((s.truth_target & s.truth_shadow).any());
        for (int r = 0; r < 64; ++r) {
            for (int c = 0; c < 64; ++c) {
                const double dr = (r - 30.0) / 6.0, dc = (c - 32.0) / 5.0;
                ASSERT_EQ(s.truth_target.at(r, c), dr * dr + dc * dc <= 1.0);
            }
        }
    }
    EXPECT_GT(gen_scene(planted(0)).truth_shadow.count(), 0u);
}

TEST(GenScene, ShadowIsAttenuatedInRawIntensities) {
    const SynthSample s = gen_scene(planted(4));
    const double shadow = masked_mean(s.raw, s.truth_shadow, true);
    const Mask fg = s.truth_target | s.truth_shadow;
    EXPECT_LT(shadow, 0.2 * masked_mean(s.raw, fg, false));
}

TEST(GenScene, BackgroundMeanWithinThreeStandardErrors) {
    SceneConfig cfg;
    std::vector<double> means;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        cfg.seed = seed;
        const SynthSample s = gen_scene(cfg);
        const auto px = s.raw.pixels();
        means.push_back(std::accumulate(px.begin(), px.end(), 0.0) / static_cast<double>(px.size()));
    }
    const double n = static_cast<double>(means.size());
    const double grand = std::accumulate(means.begin(), means.end(), 0.0) / n;
    double ss = 0.0;
    for (double m : means) ss += (m - grand) * (m - grand);
    const double se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    EXPECT_LT(std::abs(grand - cfg.background_mean), 3.0 * se)
        << "grand mean " << grand << ", se " << se;
}

TEST(GenScene, RejectsOutOfBoundsEllipse) {
    SceneConfig cfg;
    cfg.target = TargetSpec{2.0, 32.0, 5.0, 5.0, 0.5};
    EXPECT_THROW(gen_scene(cfg), ConfigError);
    cfg.target = TargetSpec{50.0, 32.0, 5.0, 5.0, 0.5};
    cfg.shadow = ShadowSpec{10.0, 0.0, 0.5};
    EXPECT_THROW(gen_scene(cfg), ConfigError);
    cfg.shadow = ShadowSpec{0.0, 0.0, 1.0};
    EXPECT_THROW(gen_scene(cfg), ConfigError);
    SceneConfig looks;
    looks.speckle_looks = 0;
    EXPECT_THROW(gen_scene(looks), ConfigError);
}

TEST(GenDataset, CountsLabelsAndMasks) {
    const DatasetSplit s = gen_dataset(3, 2, 2, SceneConfig{}, 7);
    EXPECT_EQ(s.train.size(), 3u);
    ASSERT_EQ(s.test.size(), 4u);
    EXPECT_EQ(s.count(Label::Anomalous), 2u);
    EXPECT_EQ(s.masked_anomalies(), 2u);
    for (const auto& rec : s.test) {
        ASSERT_TRUE(rec.mask);
        EXPECT_EQ(rec.mask->any(), rec.label == Label::Anomalous);
    }
    EXPECT_NO_THROW(s.validate());
}

TEST(GenDataset, DeterministicAndSeedSensitive) {
    const DatasetSplit a = gen_dataset(4, 3, 3, SceneConfig{}, 7);
    const DatasetSplit b = gen_dataset(4, 3, 3, SceneConfig{}, 7);
    const DatasetSplit c = gen_dataset(4, 3, 3, SceneConfig{}, 8);
    for (std::size_t i = 0; i < a.test.size(); ++i) {
        EXPECT_EQ(a.test[i].id, b.test[i].id);
        EXPECT_EQ(a.test[i].image, b.test[i].image);
        EXPECT_EQ(a.test[i].mask, b.test[i].mask);
    }
    EXPECT_NE(a.train[0].image, c.train[0].image);
}

TEST(GenDataset, NoAnomaliesIsAllowed) {
    const DatasetSplit s = gen_dataset(2, 2, 0, SceneConfig{}, 1);
    EXPECT_EQ(s.count(Label::Anomalous), 0u);
}

TEST(GenDataset, PlantedGeometryStaysInRange) {
    AnomalyRanges ranges;
    const DatasetSplit s = gen_dataset(0, 0, 60, SceneConfig{}, 21, ranges);
    for (const auto& rec : s.test) {
        const std::size_t area = rec.mask->count();
        // Target alone is at least a 4x4 semi-axis ellipse; target plus shadow at most two 8x8.
        EXPECT_GE(area, 40u);
        EXPECT_LE(area, 2u * 210u);
    }
}

TEST(GenDataset, ExportRoundTripsThroughIngest) {
    TempDir dir("synth");
    const DatasetSplit s = gen_dataset(3, 2, 2, SceneConfig{}, 7);
    export_dataset(s, dir.path());
    EXPECT_TRUE(validate_layout(dir.path()).empty());
    const DatasetSplit back = load_dataset(dir.path());
    ASSERT_EQ(back.train.size(), 3u);
    ASSERT_EQ(back.test.size(), 4u);
    for (std::size_t i = 0; i < s.test.size(); ++i) {
        EXPECT_EQ(back.test[i].id, s.test[i].id);
        EXPECT_EQ(back.test[i].mask, s.test[i].mask);
        // 16-bit quantization of a [0,1] image.
        for (std::size_t p = 0; p < s.test[i].image.size(); ++p) {
            ASSERT_NEAR(back.test[i].image.pixels()[p], s.test[i].image.pixels()[p], 1.0 / 65535.0);
        }
    }
}
