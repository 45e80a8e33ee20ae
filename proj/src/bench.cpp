#include "sarbench/bench.hpp"

#include "sarbench/errors.hpp"
#include "sarbench/ingest.hpp"
#include "sarbench/models.hpp"
#include "sarbench/visualize.hpp"

#include <spdlog/spdlog.h>

#include <chrono>
#include <functional>

namespace sarbench {

namespace fs = std::filesystem;

namespace {

// Runs `fn` as a named stage: records wall-clock time and tags failures.
template <typename Fn>
auto run_stage(const std::string& stage, std::vector<StageTiming>& timings, Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    auto record = [&] {
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
        timings.push_back({stage, dt.count()});
    };
    try {
        if constexpr (std::is_void_v<decltype(fn())>) {
            fn();
            record();
        } else {
            auto result = fn();
            record();
            return result;
        }
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, e.what());
    }
}

struct TestScores {
    std::vector<double> image_scores;
    std::vector<Image> maps;
};

MetricsReport evaluate_run(const BenchConfig& cfg, const DatasetSplit& data,
                           const TestScores& scores) {
    MetricsReport report;
    ScoredSet image_set;
    image_set.scores = scores.image_scores;
    for (const auto& rec : data.test) image_set.labels.push_back(rec.label == Label::Anomalous);

    if (cfg.image_level) {
        if (image_set.positives() == 0 || image_set.negatives() == 0) {
            report.notes.push_back("image_level: not computable (test split needs both classes)");
        } else {
            report.image = image_metrics(image_set);
        }
    }
    if (cfg.pixel_level) {
        std::vector<Image> maps;
        std::vector<Mask> truths;
        std::size_t skipped = 0;
        for (std::size_t i = 0; i < data.test.size(); ++i) {
            const auto& rec = data.test[i];
            if (rec.mask) {
                maps.push_back(scores.maps[i]);
                truths.push_back(*rec.mask);
            } else if (rec.label == Label::Normal) {
                maps.push_back(scores.maps[i]);
                truths.emplace_back(rec.image.height(), rec.image.width());
            } else {
                ++skipped;
            }
        }
        if (skipped > 0) {
            report.notes.push_back("pixel_level: " + std::to_string(skipped) +
                                   " anomalous image(s) without mask skipped");
        }
        bool any_positive = false;
        for (const auto& t : truths) any_positive = any_positive || t.any();
        if (!any_positive) {
            report.notes.push_back("pixel_level: not computable (no anomalous ground-truth pixels)");
        } else {
            report.pixel = pixel_metrics(maps, truths);
        }
    }
    return report;
}

void write_panels(const BenchConfig& cfg, const DatasetSplit& data, const TestScores& scores,
                  const MetricsReport& report, ModelKind model) {
    const fs::path dir = cfg.resolved_output_dir() / "panels";
    double threshold = 0.0;
    if (report.pixel) {
        threshold = report.pixel->threshold;
    } else if (report.image) {
        threshold = report.image->threshold;
    } else {
        return;
    }
    for (Label label : {Label::Anomalous, Label::Normal}) {
        int written = 0;
        for (std::size_t i = 0; i < data.test.size() && written < cfg.panels; ++i) {
            if (data.test[i].label != label) continue;
            const Panel panel = render_panel(data.test[i], scores.maps[i], threshold);
            write_panel(panel, dir, data.test[i].id, to_string(model));
            ++written;
        }
    }
}

}  // namespace

DatasetSplit materialize_dataset(const BenchConfig& cfg) {
    if (cfg.synthetic) {
        const auto& s = *cfg.synthetic;
        return gen_dataset(s.train_normal, s.test_normal, s.test_anomalous, s.scene, s.seed,
                           s.anomalies);
    }
    return load_dataset(cfg.resolved_dataset_dir());
}

RunReport run_benchmark(const BenchConfig& cfg) {
    try {
        cfg.validate();
    } catch (const std::exception& e) {
        throw StageError("config", e.what());
    }

    RunReport report;
    report.config = config_to_json(cfg);

    DatasetSplit data = run_stage("dataset", report.timings, [&] {
        DatasetSplit d = materialize_dataset(cfg);
        if (d.train.size() < 2) throw ValidationError("at least 2 training images are required");
        if (d.test.empty()) throw ValidationError("test split is empty");
        return d;
    });
    report.dataset_name = data.name;
    report.train_count = data.train.size();
    for (const auto& rec : data.test) {
        (rec.label == Label::Normal ? report.test_normal : report.test_anomalous) += 1;
    }

    if (cfg.normalgen) {
        run_stage("normalgen", report.timings, [&] {
            for (std::size_t i = 0; i < data.train.size(); ++i) {
                SeededRng rng(derive_seed(cfg.normalgen->seed, i));
                data.train[i].image =
                    generate_normal_chip(data.train[i].image, *cfg.normalgen, rng).normal;
            }
        });
    }

    std::vector<FeatureMap> train_features, test_features;
    run_stage("features", report.timings, [&] {
        for (const auto& rec : data.train) train_features.push_back(extract_features(rec.image, cfg.features));
        for (const auto& rec : data.test) test_features.push_back(extract_features(rec.image, cfg.features));
        for (const auto& fm : train_features) {
            if (!fm.same_shape(train_features.front())) {
                throw ValidationError("images differ in size; all images must share dimensions");
            }
        }
        for (const auto& fm : test_features) {
            if (!fm.same_shape(train_features.front())) {
                throw ValidationError("test image size differs from the training images");
            }
        }
    });

    auto score_test = [&](auto&& score_grid) {
        TestScores scores;
        for (std::size_t i = 0; i < data.test.size(); ++i) {
            const auto& img = data.test[i].image;
            Image map = postprocess_map(score_grid(i), img.height(), img.width(),
                                        cfg.smoothing_sigma);
            scores.image_scores.push_back(image_score(map));
            scores.maps.push_back(std::move(map));
        }
        return scores;
    };

    const bool write_images = cfg.panels > 0 && !cfg.output_dir.empty();

    for (ModelKind model : cfg.models) {
        ModelRuns runs;
        runs.model = model;
        const std::string tag = to_string(model);

        if (model == ModelKind::Padim) {
            const int k = cfg.features.effective_select_k();
            for (int r = 0; r < cfg.runs; ++r) {
                const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(r);
                SeededRng rng(seed);
                const auto channels = draw_channels(train_features.front().channels(), k, rng);

                const GaussianField field = run_stage(tag + ".fit", report.timings, [&] {
                    std::vector<FeatureMap> selected;
                    for (const auto& fm : train_features) selected.push_back(take_channels(fm, channels));
                    return padim_fit(selected, cfg.padim_epsilon);
                });
                const TestScores scores = run_stage(tag + ".score", report.timings, [&] {
                    return score_test([&](std::size_t i) {
                        return padim_score(field, take_channels(test_features[i], channels));
                    });
                });
                MetricsReport mr = run_stage(tag + ".evaluate", report.timings,
                                             [&] { return evaluate_run(cfg, data, scores); });
                if (r == 0 && write_images) {
                    run_stage(tag + ".render", report.timings,
                              [&] { write_panels(cfg, data, scores, mr, model); });
                }
                runs.runs.push_back(std::move(mr));
                runs.seeds.push_back(seed);
                runs.channels.push_back(channels);
            }
        } else {
            const PcaModel pca = run_stage(tag + ".fit", report.timings, [&] {
                return dfm_fit(train_features, cfg.dfm_retained_variance);
            });
            const TestScores scores = run_stage(tag + ".score", report.timings, [&] {
                return score_test([&](std::size_t i) { return dfm_score(pca, test_features[i]); });
            });
            const MetricsReport mr = run_stage(tag + ".evaluate", report.timings,
                                               [&] { return evaluate_run(cfg, data, scores); });
            if (write_images) {
                run_stage(tag + ".render", report.timings,
                          [&] { write_panels(cfg, data, scores, mr, model); });
            }
            std::vector<int> all(static_cast<std::size_t>(train_features.front().channels()));
            for (std::size_t c = 0; c < all.size(); ++c) all[c] = static_cast<int>(c);
            for (int r = 0; r < cfg.runs; ++r) {
                runs.runs.push_back(mr);
                runs.seeds.push_back(cfg.base_seed + static_cast<std::uint64_t>(r));
                runs.channels.push_back(all);
            }
        }
        runs.aggregate = aggregate_runs(runs.runs);
        report.models.push_back(std::move(runs));
    }
    return report;
}

}  // namespace sarbench
