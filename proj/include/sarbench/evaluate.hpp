/**
 * @file evaluate.hpp
 * @brief Image- and pixel-level anomaly detection metrics.
 *
 * Conventions:
 *   - a sample is predicted anomalous when score >= threshold
 *   - precision / recall are 0 when their denominator is 0
 *   - ROC AUC counts tied (anomalous, normal) pairs as one half
 *   - PR AUC is average precision with step interpolation; tied scores form
 *     a single threshold
 */
#pragma once

#include "sarbench/core.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sarbench {

struct ScoredSet {
    std::vector<double> scores;
    std::vector<int> labels;  // 1 = anomalous

    std::size_t positives() const;
    std::size_t negatives() const { return labels.size() - positives(); }
    /// Throws ValidationError on length mismatch, labels outside {0,1}, or non-finite scores.
    void validate() const;
};

double roc_auc(const ScoredSet& s);
double pr_auc(const ScoredSet& s);

struct ThresholdChoice {
    double threshold = 0.0;
    double f1 = 0.0;
};

/// Sweeps every distinct score; ties in F1 go to the largest threshold.
ThresholdChoice f1_opt_threshold(const ScoredSet& s);

struct Confusion {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    std::size_t total() const { return tp + fp + fn + tn; }
};

Confusion confusion_at(const ScoredSet& s, double threshold);

struct ImageMetrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double roc_auc = 0.0;
    double pr_auc = 0.0;
    double threshold = 0.0;
};

/// Thresholded metrics only; roc_auc / pr_auc are left at 0.
ImageMetrics classification_metrics(const ScoredSet& s, double threshold);

struct PixelMetrics {
    double pixel_auroc = 0.0;
    double pixel_f1 = 0.0;
    double threshold = 0.0;
};

/// Pools every pixel of every map into one set. Throws MetricUndefinedError
/// when no truth pixel is anomalous.
PixelMetrics pixel_metrics(std::span<const Image> maps, std::span<const Mask> truths);

/// Image-level suite: F1-optimal threshold, thresholded metrics, both AUCs.
ImageMetrics image_metrics(const ScoredSet& s);

struct MetricsReport {
    std::optional<ImageMetrics> image;
    std::optional<PixelMetrics> pixel;
    std::vector<std::string> notes;
};

/// Metric names in report order, paired with accessors.
const std::vector<std::string>& image_metric_names();
const std::vector<std::string>& pixel_metric_names();

/// Flattens the report to name -> value for present metric groups.
std::map<std::string, double> flatten(const MetricsReport& report);

struct MetricSummary {
    double mean = 0.0;
    double std = 0.0;  // sample std, 0 for one run or identical runs
};

struct RunAggregate {
    std::size_t runs = 0;
    std::map<std::string, MetricSummary> metrics;  // only metrics present in every run
};

RunAggregate aggregate_runs(std::span<const MetricsReport> reports);

/// Mean and sample std of a value list; exactly {v, 0} when all values equal.
MetricSummary summarize(std::span<const double> values);

}  // namespace sarbench
