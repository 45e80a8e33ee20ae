#include "sarbench/evaluate.hpp"

#include "sarbench/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sarbench {

namespace {

// Indices sorted by descending score; index order breaks ties for stability.
std::vector<std::size_t> order_descending(const std::vector<double>& scores) {
    std::vector<std::size_t> idx(scores.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return idx;
}

double safe_ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double f1_from(double precision, double recall) {
    const double den = precision + recall;
    return den > 0.0 ? 2.0 * precision * recall / den : 0.0;
}

void require_positive(const ScoredSet& s, const char* what) {
    if (s.positives() == 0) {
        throw MetricUndefinedError(std::string(what) + ": no anomalous samples");
    }
}

}  // namespace

std::size_t ScoredSet::positives() const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
}

void ScoredSet::validate() const {
    if (scores.size() != labels.size()) {
        throw ValidationError("scored set: " + std::to_string(scores.size()) + " scores vs " +
                              std::to_string(labels.size()) + " labels");
    }
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != 0 && labels[i] != 1) {
            throw ValidationError("scored set: label at " + std::to_string(i) + " not in {0,1}");
        }
        if (!std::isfinite(scores[i])) {
            throw ValidationError("scored set: non-finite score at " + std::to_string(i));
        }
    }
}

double roc_auc(const ScoredSet& s) {
    s.validate();
    const std::size_t P = s.positives();
    const std::size_t N = s.negatives();
    if (P == 0 || N == 0) throw MetricUndefinedError("roc_auc: both classes are required");

    std::vector<std::size_t> idx(s.scores.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return s.scores[a] < s.scores[b]; });

    // Mann-Whitney U from mid-ranks; every quantity is a half-integer, so the
    // sum is exact.
    double rank_sum = 0.0;
    std::size_t i = 0;
    while (i < idx.size()) {
        std::size_t j = i;
        while (j < idx.size() && s.scores[idx[j]] == s.scores[idx[i]]) ++j;
        const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t t = i; t < j; ++t) {
            if (s.labels[idx[t]] == 1) rank_sum += mid_rank;
        }
        i = j;
    }
    const double p = static_cast<double>(P);
    const double u = rank_sum - 0.5 * p * (p + 1.0);
    return u / (p * static_cast<double>(N));
}

double pr_auc(const ScoredSet& s) {
    s.validate();
    require_positive(s, "pr_auc");
    const std::size_t P = s.positives();
    const auto idx = order_descending(s.scores);

    double ap = 0.0;
    std::size_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < idx.size()) {
        std::size_t j = i;
        std::size_t group_tp = 0;
        while (j < idx.size() && s.scores[idx[j]] == s.scores[idx[i]]) {
            if (s.labels[idx[j]] == 1) ++group_tp; else ++fp;
            ++j;
        }
        tp += group_tp;
        if (group_tp > 0) {
            const double precision = safe_ratio(tp, tp + fp);
            ap += (static_cast<double>(group_tp) / static_cast<double>(P)) * precision;
        }
        i = j;
    }
    return ap;
}

ThresholdChoice f1_opt_threshold(const ScoredSet& s) {
    s.validate();
    require_positive(s, "f1_opt_threshold");
    const std::size_t P = s.positives();
    const auto idx = order_descending(s.scores);

    ThresholdChoice best{s.scores[idx.front()], -1.0};
    std::size_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < idx.size()) {
        std::size_t j = i;
        while (j < idx.size() && s.scores[idx[j]] == s.scores[idx[i]]) {
            if (s.labels[idx[j]] == 1) ++tp; else ++fp;
            ++j;
        }
        const double f1 = f1_from(safe_ratio(tp, tp + fp), safe_ratio(tp, P));
        if (f1 > best.f1) best = {s.scores[idx[i]], f1};
        i = j;
    }
    return best;
}

Confusion confusion_at(const ScoredSet& s, double threshold) {
    s.validate();
    Confusion c;
    for (std::size_t i = 0; i < s.scores.size(); ++i) {
        const bool predicted = s.scores[i] >= threshold;
        if (s.labels[i] == 1) {
            predicted ? ++c.tp : ++c.fn;
        } else {
            predicted ? ++c.fp : ++c.tn;
        }
    }
    return c;
}

ImageMetrics classification_metrics(const ScoredSet& s, double threshold) {
    const Confusion c = confusion_at(s, threshold);
    ImageMetrics m;
    m.threshold = threshold;
    m.accuracy = safe_ratio(c.tp + c.tn, c.total());
    m.precision = safe_ratio(c.tp, c.tp + c.fp);
    m.recall = safe_ratio(c.tp, c.tp + c.fn);
    m.f1 = f1_from(m.precision, m.recall);
    return m;
}

ImageMetrics image_metrics(const ScoredSet& s) {
    const ThresholdChoice choice = f1_opt_threshold(s);
    ImageMetrics m = classification_metrics(s, choice.threshold);
    m.roc_auc = roc_auc(s);
    m.pr_auc = pr_auc(s);
    return m;
}

PixelMetrics pixel_metrics(std::span<const Image> maps, std::span<const Mask> truths) {
    if (maps.size() != truths.size()) {
        throw ValidationError("pixel_metrics: " + std::to_string(maps.size()) + " maps vs " +
                              std::to_string(truths.size()) + " masks");
    }
    ScoredSet pooled;
    for (std::size_t k = 0; k < maps.size(); ++k) {
        if (!truths[k].same_shape(maps[k])) {
            throw ValidationError("pixel_metrics: map " + std::to_string(k) +
                                  " does not match its mask");
        }
        const auto px = maps[k].pixels();
        pooled.scores.insert(pooled.scores.end(), px.begin(), px.end());
        for (auto b : truths[k].bits()) pooled.labels.push_back(b ? 1 : 0);
    }
    if (pooled.positives() == 0) {
        throw MetricUndefinedError("pixel_metrics: no anomalous pixels in the ground truth");
    }
    PixelMetrics out;
    out.pixel_auroc = roc_auc(pooled);
    const ThresholdChoice choice = f1_opt_threshold(pooled);
    out.pixel_f1 = choice.f1;
    out.threshold = choice.threshold;
    return out;
}

const std::vector<std::string>& image_metric_names() {
    static const std::vector<std::string> names{"accuracy", "precision", "recall",
                                                "f1",       "roc_auc",   "pr_auc"};
    return names;
}

const std::vector<std::string>& pixel_metric_names() {
    static const std::vector<std::string> names{"pixel_auroc", "pixel_f1"};
    return names;
}

std::map<std::string, double> flatten(const MetricsReport& report) {
    std::map<std::string, double> out;
    if (report.image) {
        const auto& m = *report.image;
        out["accuracy"] = m.accuracy;
        out["precision"] = m.precision;
        out["recall"] = m.recall;
        out["f1"] = m.f1;
        out["roc_auc"] = m.roc_auc;
        out["pr_auc"] = m.pr_auc;
    }
    if (report.pixel) {
        out["pixel_auroc"] = report.pixel->pixel_auroc;
        out["pixel_f1"] = report.pixel->pixel_f1;
    }
    return out;
}

MetricSummary summarize(std::span<const double> values) {
    if (values.empty()) throw ValidationError("summarize: no values");
    if (std::all_of(values.begin(), values.end(), [&](double v) { return v == values[0]; })) {
        return {values[0], 0.0};
    }
    const double n = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / (n - 1.0))};
}

RunAggregate aggregate_runs(std::span<const MetricsReport> reports) {
    if (reports.empty()) throw ValidationError("aggregate_runs: no reports");
    RunAggregate agg;
    agg.runs = reports.size();

    std::vector<std::map<std::string, double>> flat;
    for (const auto& r : reports) flat.push_back(flatten(r));

    for (const auto& [name, _] : flat.front()) {
        std::vector<double> values;
        for (const auto& f : flat) {
            auto it = f.find(name);
            if (it == f.end()) break;
            values.push_back(it->second);
        }
        if (values.size() == flat.size()) agg.metrics[name] = summarize(values);
    }
    return agg;
}

}  // namespace sarbench
