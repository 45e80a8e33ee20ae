/**
 * @file bench.hpp
 * @brief Config-driven benchmark: dataset -> (normalgen) -> features -> models
 *        -> anomaly maps -> metrics, repeated over seeded runs.
 *
 * Run i uses seed base_seed + i for the random channel selection of the
 * Gaussian-field model. The PCA model has no random component: it is evaluated
 * once and its report is repeated for every run.
 */
#pragma once

#include "sarbench/dataset.hpp"
#include "sarbench/evaluate.hpp"
#include "sarbench/features.hpp"
#include "sarbench/normalgen.hpp"
#include "sarbench/synthesize.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sarbench {

inline constexpr const char* kToolkitVersion = "0.1.0";

enum class ModelKind { Padim, Dfm };

const char* to_string(ModelKind kind) noexcept;
ModelKind parse_model(const std::string& name);
bool is_deterministic(ModelKind kind) noexcept;

struct SyntheticSpec {
    int train_normal = 200;
    int test_normal = 50;
    int test_anomalous = 50;
    std::uint64_t seed = 7;
    SceneConfig scene = default_scene();
    AnomalyRanges anomalies = default_anomalies();

    /// 16-look clutter; a bright target compresses the min-max range of its chip,
    /// so the default boost stays moderate.
    static SceneConfig default_scene() {
        SceneConfig s;
        s.speckle_looks = 16;
        return s;
    }
    static AnomalyRanges default_anomalies() {
        AnomalyRanges a;
        a.intensity_boost = 0.3;
        return a;
    }
};

struct BenchConfig {
    std::optional<std::string> dataset_dir;  // as written in the config
    std::optional<SyntheticSpec> synthetic;
    std::vector<ModelKind> models{ModelKind::Padim, ModelKind::Dfm};
    int runs = 5;
    std::uint64_t base_seed = 0;
    bool image_level = true;
    bool pixel_level = true;
    FeatureConfig features;
    double padim_epsilon = 0.01;
    double dfm_retained_variance = 0.97;
    double smoothing_sigma = 4.0;
    std::optional<NormalGenConfig> normalgen;  // applied to training images
    int panels = 4;                            // per label, per model
    std::filesystem::path output_dir;
    std::filesystem::path base_dir;  // relative paths resolve against this

    /// Throws ConfigError describing the first violation.
    void validate() const;
    std::filesystem::path resolved_dataset_dir() const;
    std::filesystem::path resolved_output_dir() const;
};

/// Parses the YAML config format documented in configs/example.yaml.
BenchConfig parse_config(const std::string& yaml_text, const std::filesystem::path& base_dir = {});
BenchConfig load_config(const std::filesystem::path& path);

/// Canonical echo of the computational settings (output location excluded).
nlohmann::json config_to_json(const BenchConfig& cfg);

struct ModelRuns {
    ModelKind model = ModelKind::Padim;
    std::vector<MetricsReport> runs;
    std::vector<std::uint64_t> seeds;
    std::vector<std::vector<int>> channels;  // channel subset used per run
    RunAggregate aggregate;
};

struct StageTiming {
    std::string stage;
    double seconds = 0.0;
};

struct RunReport {
    std::string version = kToolkitVersion;
    nlohmann::json config;
    std::string dataset_name;
    std::size_t train_count = 0;
    std::size_t test_normal = 0;
    std::size_t test_anomalous = 0;
    std::vector<ModelRuns> models;
    std::vector<StageTiming> timings;  // kept out of the structured report
};

/// Executes the benchmark. When cfg.panels > 0 and an output directory is set,
/// result panels of run 0 are written to <output_dir>/panels.
RunReport run_benchmark(const BenchConfig& cfg);

/// Builds the dataset described by the config (load or synthesize).
DatasetSplit materialize_dataset(const BenchConfig& cfg);

/// Structured report (deterministic; no timings).
nlohmann::json report_to_json(const RunReport& report);

/// Comma-separated aggregates, one row per model and metric.
std::string render_csv(const nlohmann::json& report);

/// Markdown tables with "mean ± std" percentages and the best mean bolded.
std::string render_markdown(const nlohmann::json& report);

/// Formats one aggregate cell as a percentage with two decimals.
std::string format_cell(double mean, double std, bool show_std);

/// Writes report.json, aggregates.csv, report.md and timings.json into outdir.
std::vector<std::filesystem::path> emit_report(const RunReport& report,
                                               const std::filesystem::path& outdir);

/// Regenerates aggregates.csv and report.md from a report.json file.
std::vector<std::filesystem::path> render_report_file(const std::filesystem::path& report_json,
                                                      const std::filesystem::path& outdir);

}  // namespace sarbench
