#include "sarbench/errors.hpp"
#include "sarbench/image_io.hpp"
#include "sarbench/ingest.hpp"

#include "support.hpp"

#include <algorithm>
#include <fstream>

using namespace sarbench;
using sarbench::testing::TempDir;
using sarbench::testing::random_image;
namespace fs = std::filesystem;

namespace {

void put_image(const fs::path& p, int h, int w, SeededRng& rng) {
    fs::create_directories(p.parent_path());
    io::write_png_gray16(p, random_image(h, w, rng));
}

void put_mask(const fs::path& p, int h, int w) {
    fs::create_directories(p.parent_path());
    Mask m(h, w);
    m.set(0, 0, true);
    io::write_png_mask(p, m);
}

// 3 train, 2 test normal, 2 test anomalous with masks.
void make_layout(const fs::path& root, SeededRng& rng) {
    for (const char* n : {"c", "a", "b"}) put_image(root / "train/normal" / (std::string(n) + ".png"), 16, 16, rng);
    for (const char* n : {"n1", "n0"}) put_image(root / "test/normal" / (std::string(n) + ".png"), 16, 16, rng);
    for (const char* n : {"x1", "x0"}) {
        put_image(root / "test/anomalous" / (std::string(n) + ".png"), 16, 16, rng);
        put_mask(root / "ground_truth/anomalous" / (std::string(n) + ".png"), 16, 16);
    }
}

}  // namespace

TEST(LoadDataset, CountsAndOrdering) {
    TempDir dir("ingest");
    SeededRng rng(1);
    make_layout(dir.path(), rng);
    const DatasetSplit s = load_dataset(dir.path());
    ASSERT_EQ(s.train.size(), 3u);
    ASSERT_EQ(s.test.size(), 4u);
    EXPECT_EQ(s.train[0].id, "a");
    EXPECT_EQ(s.train[2].id, "c");
    EXPECT_EQ(s.test[0].id, "n0");
    EXPECT_EQ(s.test[2].id, "x0");
    EXPECT_EQ(s.count(Label::Anomalous), 2u);
    EXPECT_EQ(s.masked_anomalies(), 2u);
    EXPECT_TRUE(s.test[2].mask->at(0, 0));
    EXPECT_EQ(s.test[2].mask->count(), 1u);
    for (const auto& rec : s.train) {
        for (double p : rec.image.pixels()) {
            ASSERT_GE(p, 0.0);
            ASSERT_LE(p, 1.0);
        }
    }
}

TEST(LoadDataset, MissingMaskLeavesRecordUnmasked) {
    TempDir dir("ingest");
    SeededRng rng(2);
    make_layout(dir.path(), rng);
    fs::remove(dir.path() / "ground_truth/anomalous/x1.png");
    const DatasetSplit s = load_dataset(dir.path());
    EXPECT_TRUE(s.test[2].mask.has_value());
    EXPECT_FALSE(s.test[3].mask.has_value());
    EXPECT_EQ(s.masked_anomalies(), 1u);
}

TEST(LoadDataset, MaskSizeMismatchNamesFile) {
    TempDir dir("ingest");
    SeededRng rng(3);
    make_layout(dir.path(), rng);
    put_mask(dir.path() / "ground_truth/anomalous/x0.png", 8, 16);
    try {
        load_dataset(dir.path());
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("x0.png"), std::string::npos);
    }
}

TEST(LoadDataset, MissingTrainDirectoryIsLayoutError) {
    TempDir dir("ingest");
    EXPECT_THROW(load_dataset(dir.path() / "nope"), LayoutError);
    fs::create_directories(dir.path() / "test/normal");
    try {
        load_dataset(dir.path());
        FAIL() << "expected LayoutError";
    } catch (const LayoutError& e) {
        EXPECT_NE(std::string(e.what()).find("train/normal"), std::string::npos);
    }
    fs::create_directories(dir.path() / "train/normal");
    EXPECT_THROW(load_dataset(dir.path()), LayoutError);
}

TEST(LoadDataset, UnreadableImageIsDecodeError) {
    TempDir dir("ingest");
    SeededRng rng(4);
    make_layout(dir.path(), rng);
    std::ofstream(dir.path() / "train/normal/z.png") << "garbage";
    EXPECT_THROW(load_dataset(dir.path()), DecodeError);
}

TEST(LoadDataset, MaskBinarizedAtHalfRange) {
    TempDir dir("ingest");
    SeededRng rng(5);
    make_layout(dir.path(), rng);
    // 16-bit mask: 32767 < 65535/2 <= 32768.
    Image soft(16, 16);
    soft.at(0, 0) = 32767.0 / 65535.0;
    soft.at(0, 1) = 32768.0 / 65535.0;
    soft.at(0, 2) = 1.0;
    io::write_png_gray16(dir.path() / "ground_truth/anomalous/x0.png", soft);
    const DatasetSplit s = load_dataset(dir.path());
    const Mask& m = *s.test[2].mask;
    EXPECT_FALSE(m.at(0, 0));
    EXPECT_TRUE(m.at(0, 1));
    EXPECT_TRUE(m.at(0, 2));
    EXPECT_EQ(m.count(), 2u);
}

TEST(LoadDataset, DeterministicAcrossLoads) {
    TempDir dir("ingest");
    SeededRng rng(6);
    make_layout(dir.path(), rng);
    const DatasetSplit a = load_dataset(dir.path());
    const DatasetSplit b = load_dataset(dir.path());
    ASSERT_EQ(a.train.size(), b.train.size());
    ASSERT_EQ(a.test.size(), b.test.size());
    for (std::size_t i = 0; i < a.test.size(); ++i) {
        EXPECT_EQ(a.test[i].id, b.test[i].id);
        EXPECT_EQ(a.test[i].image, b.test[i].image);
        EXPECT_EQ(a.test[i].mask, b.test[i].mask);
    }
}

TEST(LoadDataset, FuzzedTreesSatisfyRecordInvariants) {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        TempDir dir("fuzz" + std::to_string(seed));
        SeededRng rng(100 + seed);
        const int h = 4 + static_cast<int>(rng.uniform_index(12));
        const int w = 4 + static_cast<int>(rng.uniform_index(12));
        const int n_train = 1 + static_cast<int>(rng.uniform_index(4));
        const int n_norm = static_cast<int>(rng.uniform_index(4));
        const int n_anom = static_cast<int>(rng.uniform_index(4));
        // Empty test folders are legal; missing ones are a layout error.
        for (const char* sub : {"train/normal", "test/normal", "test/anomalous"}) {
            std::filesystem::create_directories(dir.path() / sub);
        }
        for (int i = 0; i < n_train; ++i) {
            if (rng.uniform() < 0.5) {
                put_image(dir.path() / "train/normal" / ("t" + std::to_string(i) + ".png"), h, w, rng);
            } else {
                std::ofstream pgm(dir.path() / "train/normal" / ("t" + std::to_string(i) + ".pgm"));
                pgm << "P2 " << w << ' ' << h << " 255\n";
                for (int p = 0; p < h * w; ++p) pgm << rng.uniform_index(256) << ' ';
            }
        }
        for (int i = 0; i < n_norm; ++i) put_image(dir.path() / "test/normal" / ("n" + std::to_string(i) + ".png"), h, w, rng);
        for (int i = 0; i < n_anom; ++i) {
            put_image(dir.path() / "test/anomalous" / ("a" + std::to_string(i) + ".png"), h, w, rng);
            if (rng.uniform() < 0.7) put_mask(dir.path() / "ground_truth/anomalous" / ("a" + std::to_string(i) + ".png"), h, w);
        }
        const DatasetSplit s = load_dataset(dir.path());
        ASSERT_EQ(s.train.size(), static_cast<std::size_t>(n_train)) << seed;
        ASSERT_EQ(s.test.size(), static_cast<std::size_t>(n_norm + n_anom)) << seed;
        EXPECT_NO_THROW(s.validate());
        for (const auto& rec : s.test) {
            EXPECT_NO_THROW(rec.validate());
            if (rec.label == Label::Normal) {
                EXPECT_TRUE(rec.mask && !rec.mask->any());
            }
        }
        EXPECT_TRUE(std::is_sorted(s.train.begin(), s.train.end(),
                                   [](const auto& x, const auto& y) { return x.id < y.id; }));
    }
}

TEST(ValidateLayout, ValidLayoutHasNoFindings) {
    TempDir dir("ingest");
    SeededRng rng(7);
    make_layout(dir.path(), rng);
    EXPECT_TRUE(validate_layout(dir.path()).empty());
}

TEST(ValidateLayout, OrphanMaskIsNamed) {
    TempDir dir("ingest");
    SeededRng rng(8);
    make_layout(dir.path(), rng);
    put_mask(dir.path() / "ground_truth/anomalous/ghost.png", 16, 16);
    const auto f = validate_layout(dir.path());
    ASSERT_EQ(f.size(), 1u);
    EXPECT_NE(f[0].find("ghost.png"), std::string::npos);
}

TEST(ValidateLayout, EmptyTrainDirectory) {
    TempDir dir("ingest");
    for (const char* sub : {"train/normal", "test/normal", "test/anomalous"}) fs::create_directories(dir.path() / sub);
    const auto f = validate_layout(dir.path());
    ASSERT_EQ(f.size(), 1u);
    EXPECT_EQ(f[0], "no normal training images");
}

TEST(ValidateLayout, MissingDirectoriesAndDuplicates) {
    TempDir dir("ingest");
    SeededRng rng(9);
    put_image(dir.path() / "train/normal/a.png", 8, 8, rng);
    std::ofstream(dir.path() / "train/normal/a.pgm") << "P2 1 1 1 0";
    const auto f = validate_layout(dir.path());
    EXPECT_NE(std::find(f.begin(), f.end(), "missing directory test/normal"), f.end());
    EXPECT_NE(std::find(f.begin(), f.end(), "missing directory test/anomalous"), f.end());
    EXPECT_NE(std::find(f.begin(), f.end(), "duplicate name 'a' in train/normal"), f.end());
    EXPECT_THROW(load_dataset(dir.path()), LayoutError);
}
