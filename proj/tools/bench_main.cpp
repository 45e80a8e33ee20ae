// sarbench command-line front end.
//
// Every subcommand exits 0 on success. Failures print "error: [stage] message"
// to stderr and exit 1; `validate` exits 2 when the layout has findings.

#include "sarbench/bench.hpp"
#include "sarbench/errors.hpp"
#include "sarbench/image_io.hpp"
#include "sarbench/ingest.hpp"
#include "sarbench/model_io.hpp"
#include "sarbench/models.hpp"
#include "sarbench/normalgen.hpp"
#include "sarbench/synthesize.hpp"
#include "sarbench/visualize.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdio>
#include <iostream>

namespace fs = std::filesystem;
using namespace sarbench;

namespace {

int cmd_run(const fs::path& config_path, const std::string& out_override) {
    BenchConfig cfg;
    try {
        cfg = load_config(config_path);
        if (!out_override.empty()) {
            cfg.output_dir = out_override;
            cfg.base_dir.clear();
        }
        if (cfg.output_dir.empty()) cfg.output_dir = "results";
    } catch (const std::exception& e) {
        throw StageError("config", e.what());
    }
    const RunReport report = run_benchmark(cfg);
    std::vector<fs::path> written;
    try {
        written = emit_report(report, cfg.resolved_output_dir());
    } catch (const std::exception& e) {
        throw StageError("report", e.what());
    }
    std::cout << render_markdown(report_to_json(report));
    for (const auto& p : written) spdlog::info("wrote {}", p.string());
    return 0;
}

int cmd_validate(const fs::path& root) {
    const auto findings = validate_layout(root);
    if (findings.empty()) {
        std::cout << "ok: " << root.string() << " follows the dataset layout\n";
        return 0;
    }
    for (const auto& f : findings) std::cout << "finding: " << f << '\n';
    return 2;
}

struct SynthArgs {
    fs::path out;
    int train = 200, test_normal = 50, test_anomalous = 50;
    std::uint64_t seed = 7;
    int height = 64, width = 64, looks = 16;
    double boost = 0.3;
};

int cmd_synth(const SynthArgs& a) {
    SceneConfig scene;
    scene.height = a.height;
    scene.width = a.width;
    scene.speckle_looks = a.looks;
    AnomalyRanges ranges;
    ranges.intensity_boost = a.boost;
    DatasetSplit split;
    try {
        split = gen_dataset(a.train, a.test_normal, a.test_anomalous, scene, a.seed, ranges);
    } catch (const std::exception& e) {
        throw StageError("synthesize", e.what());
    }
    try {
        export_dataset(split, a.out);
    } catch (const std::exception& e) {
        throw StageError("export", e.what());
    }
    std::cout << "wrote " << split.train.size() << " train and " << split.test.size()
              << " test images to " << a.out.string() << '\n';
    return 0;
}

// Chips in `in` (sorted by name) -> <out>/train/normal (generated normals),
// <out>/test/anomalous (original chips), <out>/ground_truth/anomalous (target|shadow).
int cmd_normalgen(const fs::path& in, const fs::path& out, const NormalGenConfig& cfg) {
    std::vector<fs::path> files;
    try {
        cfg.validate();
        if (!fs::is_directory(in)) throw IoError("input directory not found: " + in.string());
        for (const auto& e : fs::directory_iterator(in)) {
            if (e.is_regular_file() && io::is_supported_image(e.path())) files.push_back(e.path());
        }
        std::sort(files.begin(), files.end());
        if (files.empty()) throw ValidationError("no .png/.pgm images in " + in.string());
        for (const char* sub : {"train/normal", "test/anomalous", "ground_truth/anomalous"}) {
            fs::create_directories(out / sub);
        }
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError("normalgen", e.what());
    }
    for (std::size_t i = 0; i < files.size(); ++i) {
        const std::string stem = files[i].stem().string();
        try {
            const Image img = load_image(files[i]);
            SeededRng rng(derive_seed(cfg.seed, i));
            const NormalChip chip = generate_normal_chip(img, cfg, rng);
            io::write_png_gray16(out / "train/normal" / (stem + ".png"), chip.normal);
            io::write_png_gray16(out / "test/anomalous" / (stem + ".png"), img);
            io::write_png_mask(out / "ground_truth/anomalous" / (stem + ".png"),
                               chip.target_mask | chip.shadow_mask);
        } catch (const std::exception& e) {
            throw StageError("normalgen", files[i].filename().string() + ": " + e.what());
        }
    }
    std::cout << "generated " << files.size() << " normal chip(s) in " << out.string() << '\n';
    return 0;
}

int cmd_render(const fs::path& report, fs::path out) {
    if (out.empty()) out = report.parent_path();
    std::vector<fs::path> written;
    try {
        written = render_report_file(report, out);
    } catch (const std::exception& e) {
        throw StageError("render", e.what());
    }
    for (const auto& p : written) std::cout << "wrote " << p.string() << '\n';
    return 0;
}

int cmd_fit(const fs::path& config_path, const std::string& model_name, int run,
            const fs::path& out) {
    BenchConfig cfg;
    ModelKind kind{};
    try {
        cfg = load_config(config_path);
        kind = parse_model(model_name);
        if (run < 0) throw ConfigError("--run must be >= 0");
    } catch (const std::exception& e) {
        throw StageError("config", e.what());
    }
    DatasetSplit data;
    try {
        data = materialize_dataset(cfg);
    } catch (const std::exception& e) {
        throw StageError("dataset", e.what());
    }
    StoredModel model;
    try {
        if (cfg.normalgen) {
            for (std::size_t i = 0; i < data.train.size(); ++i) {
                SeededRng rng(derive_seed(cfg.normalgen->seed, i));
                data.train[i].image =
                    generate_normal_chip(data.train[i].image, *cfg.normalgen, rng).normal;
            }
        }
        std::vector<FeatureMap> feats;
        for (const auto& rec : data.train) feats.push_back(extract_features(rec.image, cfg.features));
        model.kind = kind;
        model.features = cfg.features;
        const int C = cfg.features.channel_count();
        if (kind == ModelKind::Padim) {
            SeededRng rng(cfg.base_seed + static_cast<std::uint64_t>(run));
            model.channels = draw_channels(C, cfg.features.effective_select_k(), rng);
            std::vector<FeatureMap> selected;
            for (const auto& fm : feats) selected.push_back(take_channels(fm, model.channels));
            model.state = padim_fit(selected, cfg.padim_epsilon);
        } else {
            for (int c = 0; c < C; ++c) model.channels.push_back(c);
            model.state = dfm_fit(feats, cfg.dfm_retained_variance);
        }
    } catch (const std::exception& e) {
        throw StageError("fit", e.what());
    }
    try {
        save_model(out, model);
    } catch (const std::exception& e) {
        throw StageError("save", e.what());
    }
    std::cout << "saved " << model_name << " model to " << out.string() << '\n';
    return 0;
}

int cmd_score(const fs::path& model_path, const std::vector<fs::path>& images,
              const fs::path& out, double sigma, const std::vector<double>& range) {
    std::optional<DisplayRange> display;
    if (range.size() == 2) display = DisplayRange{range[0], range[1]};
    StoredModel model;
    try {
        model = load_model(model_path);
    } catch (const std::exception& e) {
        throw StageError("load", e.what());
    }
    if (!out.empty()) fs::create_directories(out);
    for (const auto& path : images) {
        try {
            const Image img = load_image(path);
            const Image map = postprocess_map(model.score(img), img.height(), img.width(), sigma);
            std::printf("%s\t%.17g\n", path.string().c_str(), image_score(map));
            if (!out.empty()) {
                io::write_png_rgb(out / (path.stem().string() + "_heatmap.png"), render_heatmap(map, display));
            }
        } catch (const std::exception& e) {
            throw StageError("score", path.string() + ": " + e.what());
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sarbench: anomaly detection benchmarking for SAR image chips"};
    app.require_subcommand(1);
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "Debug logging");

    auto* run = app.add_subcommand("run", "Run a benchmark from a YAML config");
    fs::path config;
    std::string out_dir;
    run->add_option("-c,--config", config, "Benchmark config (YAML)")->required()->check(CLI::ExistingFile);
    run->add_option("-o,--out", out_dir, "Output directory (overrides output_dir)");

    auto* validate = app.add_subcommand("validate", "Check a dataset directory layout");
    fs::path dataset;
    validate->add_option("-d,--dataset", dataset, "Dataset root")->required();

    auto* synth = app.add_subcommand("synth", "Write a synthetic dataset in the ingest layout");
    SynthArgs sa;
    synth->add_option("-o,--out", sa.out, "Output dataset root")->required();
    synth->add_option("--train", sa.train, "Normal training images")->capture_default_str();
    synth->add_option("--test-normal", sa.test_normal, "Normal test images")->capture_default_str();
    synth->add_option("--test-anomalous", sa.test_anomalous, "Anomalous test images")->capture_default_str();
    synth->add_option("--seed", sa.seed, "Dataset seed")->capture_default_str();
    synth->add_option("--height", sa.height, "Chip height")->capture_default_str();
    synth->add_option("--width", sa.width, "Chip width")->capture_default_str();
    synth->add_option("--looks", sa.looks, "Speckle looks")->capture_default_str();
    synth->add_option("--boost", sa.boost, "Target intensity boost")->capture_default_str();

    auto* ngen = app.add_subcommand("normalgen", "Remove targets and shadows from chips");
    fs::path ng_in, ng_out;
    NormalGenConfig ng_cfg;
    std::string rule = "largest";
    ngen->add_option("-i,--in", ng_in, "Directory of input chips")->required();
    ngen->add_option("-o,--out", ng_out, "Output dataset root")->required();
    ngen->add_option("--shadow-rule", rule, "largest|darkest")->capture_default_str();
    ngen->add_option("--target-k", ng_cfg.target_k)->capture_default_str();
    ngen->add_option("--shadow-k", ng_cfg.shadow_k)->capture_default_str();
    ngen->add_option("--n-init", ng_cfg.n_init)->capture_default_str();
    ngen->add_option("--max-iter", ng_cfg.max_iter)->capture_default_str();
    ngen->add_option("--seed", ng_cfg.seed)->capture_default_str();

    auto* render = app.add_subcommand("render", "Regenerate CSV and markdown from report.json");
    fs::path report_path, render_out;
    render->add_option("-r,--report", report_path, "report.json")->required()->check(CLI::ExistingFile);
    render->add_option("-o,--out", render_out, "Output directory (default: next to the report)");

    auto* fit = app.add_subcommand("fit", "Fit one model on a config's training split and save it");
    fs::path fit_out;
    std::string fit_model = "padim";
    int fit_run = 0;
    fit->add_option("-c,--config", config, "Benchmark config (YAML)")->required()->check(CLI::ExistingFile);
    fit->add_option("-m,--model", fit_model, "padim|dfm")->capture_default_str();
    fit->add_option("--run", fit_run, "Run index (seed = base_seed + run)")->capture_default_str();
    fit->add_option("-o,--out", fit_out, "Model file")->required();

    auto* score = app.add_subcommand("score", "Score images with a saved model");
    fs::path model_path, score_out;
    std::vector<fs::path> images;
    double sigma = kDefaultSmoothingSigma;
    score->add_option("-m,--model", model_path, "Model file")->required()->check(CLI::ExistingFile);
    score->add_option("images", images, "Images to score")->required();
    score->add_option("-o,--out", score_out, "Directory for heatmap PNGs");
    score->add_option("--sigma", sigma, "Smoothing sigma")->capture_default_str();
    std::vector<double> range;
    score->add_option("--range", range, "Absolute heatmap range LO HI (default: per-map min-max)")
        ->expected(2);

    CLI11_PARSE(app, argc, argv);
    spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

    try {
        if (*run) return cmd_run(config, out_dir);
        if (*validate) return cmd_validate(dataset);
        if (*synth) return cmd_synth(sa);
        if (*ngen) {
            try {
                ng_cfg.shadow_rule = parse_shadow_rule(rule);
            } catch (const std::exception& e) {
                throw StageError("config", e.what());
            }
            return cmd_normalgen(ng_in, ng_out, ng_cfg);
        }
        if (*render) return cmd_render(report_path, render_out);
        if (*fit) return cmd_fit(config, fit_model, fit_run, fit_out);
        if (*score) return cmd_score(model_path, images, score_out, sigma, range);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
