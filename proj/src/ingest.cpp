#include "sarbench/ingest.hpp"

#include "sarbench/errors.hpp"
#include "sarbench/image_io.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <map>
#include <set>

namespace sarbench {

namespace fs = std::filesystem;

namespace {

constexpr const char* kExpectedTree =
    "expected layout:\n"
    "  <root>/train/normal/*.png|pgm\n"
    "  <root>/test/normal/*.png|pgm\n"
    "  <root>/test/anomalous/*.png|pgm\n"
    "  <root>/ground_truth/anomalous/<stem>.png";

// Supported image files of a directory, sorted by file name. Missing
// directories yield an empty list.
std::vector<fs::path> list_images(const fs::path& dir) {
    std::vector<fs::path> files;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) return files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && io::is_supported_image(entry.path())) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
    return files;
}

std::vector<std::string> duplicate_stems(const std::vector<fs::path>& files) {
    std::map<std::string, int> seen;
    for (const auto& f : files) ++seen[f.stem().string()];
    std::vector<std::string> dups;
    for (const auto& [stem, n] : seen) {
        if (n > 1) dups.push_back(stem);
    }
    return dups;
}

SampleRecord load_record(const fs::path& file, Label label) {
    SampleRecord rec;
    rec.id = file.stem().string();
    rec.image = load_image(file);
    rec.label = label;
    return rec;
}

}  // namespace

Image load_image(const fs::path& path) {
    const io::GrayRaster raster = io::read_gray(path);
    if (raster.converted_from_color) {
        spdlog::warn("{}: color image converted to gray by channel average", path.string());
    }
    return normalize_image(io::to_image(raster));
}

Mask load_mask(const fs::path& path) {
    const io::GrayRaster raster = io::read_gray(path);
    std::vector<std::uint8_t> bits(raster.samples.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        bits[i] = 2u * raster.samples[i] >= raster.maxval ? 1 : 0;
    }
    return Mask(raster.height, raster.width, std::move(bits));
}

DatasetSplit load_dataset(const fs::path& root) {
    std::error_code ec;
    if (!fs::is_directory(root, ec)) {
        throw LayoutError("dataset root " + root.string() + " is not a directory; " +
                          kExpectedTree);
    }
    const fs::path train_dir = root / "train" / "normal";
    if (!fs::is_directory(train_dir, ec)) {
        throw LayoutError("missing " + train_dir.string() + "; " + kExpectedTree);
    }
    const auto train_files = list_images(train_dir);
    if (train_files.empty()) {
        throw LayoutError("no normal training images in " + train_dir.string());
    }
    const auto test_normal = list_images(root / "test" / "normal");
    const auto test_anom = list_images(root / "test" / "anomalous");
    for (const auto* files : {&train_files, &test_normal, &test_anom}) {
        const auto dups = duplicate_stems(*files);
        if (!dups.empty()) {
            throw LayoutError("duplicate file stem '" + dups.front() + "' in " +
                              files->front().parent_path().string());
        }
    }

    DatasetSplit split;
    split.name = root.filename().string();
    if (split.name.empty()) split.name = root.parent_path().filename().string();

    for (const auto& f : train_files) split.train.push_back(load_record(f, Label::Normal));
    for (const auto& f : test_normal) {
        SampleRecord rec = load_record(f, Label::Normal);
        rec.mask = Mask(rec.image.height(), rec.image.width());
        split.test.push_back(std::move(rec));
    }
    const fs::path gt_dir = root / "ground_truth" / "anomalous";
    for (const auto& f : test_anom) {
        SampleRecord rec = load_record(f, Label::Anomalous);
        const fs::path mask_path = gt_dir / (f.stem().string() + ".png");
        if (fs::is_regular_file(mask_path, ec)) {
            Mask mask = load_mask(mask_path);
            if (!mask.same_shape(rec.image)) {
                throw ValidationError(mask_path.string() + ": mask is " +
                                      std::to_string(mask.height()) + "x" +
                                      std::to_string(mask.width()) + " but image is " +
                                      std::to_string(rec.image.height()) + "x" +
                                      std::to_string(rec.image.width()));
            }
            rec.mask = std::move(mask);
        } else {
            spdlog::warn("{}: no ground-truth mask; excluded from pixel metrics", f.string());
        }
        split.test.push_back(std::move(rec));
    }
    split.validate();
    return split;
}

std::vector<std::string> validate_layout(const fs::path& root) {
    std::vector<std::string> findings;
    std::error_code ec;
    if (!fs::is_directory(root, ec)) {
        findings.push_back("dataset root " + root.string() + " is not a directory");
        return findings;
    }
    for (const char* sub : {"train/normal", "test/normal", "test/anomalous"}) {
        if (!fs::is_directory(root / sub, ec)) {
            findings.push_back("missing directory " + std::string(sub));
        }
    }
    const auto train_files = list_images(root / "train" / "normal");
    const auto test_normal = list_images(root / "test" / "normal");
    const auto test_anom = list_images(root / "test" / "anomalous");
    const auto masks = list_images(root / "ground_truth" / "anomalous");

    if (fs::is_directory(root / "train" / "normal", ec) && train_files.empty()) {
        findings.push_back("no normal training images");
    }

    const std::pair<const char*, const std::vector<fs::path>*> dirs[] = {
        {"train/normal", &train_files},
        {"test/normal", &test_normal},
        {"test/anomalous", &test_anom},
        {"ground_truth/anomalous", &masks}};
    for (const auto& [name, files] : dirs) {
        for (const auto& stem : duplicate_stems(*files)) {
            findings.push_back("duplicate name '" + stem + "' in " + name);
        }
    }

    std::set<std::string> anomalous_stems;
    for (const auto& f : test_anom) anomalous_stems.insert(f.stem().string());
    for (const auto& f : test_normal) {
        if (anomalous_stems.count(f.stem().string())) {
            findings.push_back("name '" + f.stem().string() +
                               "' appears in both test/normal and test/anomalous");
        }
    }
    for (const auto& m : masks) {
        if (m.extension() != ".png") {
            findings.push_back("mask " + m.filename().string() + " is not a .png file");
        } else if (!anomalous_stems.count(m.stem().string())) {
            findings.push_back("orphan mask ground_truth/anomalous/" + m.filename().string() +
                               " has no matching test/anomalous image");
        }
    }
    return findings;
}

}  // namespace sarbench
