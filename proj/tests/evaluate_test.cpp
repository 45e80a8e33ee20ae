#include "sarbench/errors.hpp"
#include "sarbench/evaluate.hpp"
#include "sarbench/rng.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace sarbench;

namespace {

ScoredSet random_set(SeededRng& rng, std::size_t n, bool coarse) {
    ScoredSet s;
    for (std::size_t i = 0; i < n; ++i) {
        const int y = i < 2 ? static_cast<int>(i) : static_cast<int>(rng.uniform_index(2));
        // Coarse scores produce many ties.
        const double x = coarse ? static_cast<double>(rng.uniform_index(6)) / 5.0 : rng.uniform();
        s.scores.push_back(x + (coarse ? 0.0 : 0.3 * y));
        s.labels.push_back(y);
    }
    return s;
}

}  // namespace

TEST(RocAuc, Example) {
    const ScoredSet s{{0.1, 0.4, 0.35, 0.8}, {0, 0, 1, 1}};
    EXPECT_EQ(roc_auc(s), 0.75);
    EXPECT_EQ(roc_auc(ScoredSet{{0.5, 0.5}, {0, 1}}), 0.5);
    EXPECT_EQ(roc_auc(ScoredSet{{0.1, 0.9}, {0, 1}}), 1.0);
}

TEST(PrAuc, Example) {
    const ScoredSet s{{0.1, 0.4, 0.35, 0.8}, {0, 0, 1, 1}};
    EXPECT_NEAR(pr_auc(s), 0.5 + 0.5 * (2.0 / 3.0), 1e-15);
    // One tied group holding everything: precision = prevalence.
    EXPECT_NEAR(pr_auc(ScoredSet{{0.3, 0.3, 0.3, 0.3}, {1, 0, 0, 0}}), 0.25, 1e-15);
}

TEST(F1Threshold, Examples) {
    const ScoredSet s{{0.1, 0.4, 0.35, 0.8}, {0, 0, 1, 1}};
    const auto c = f1_opt_threshold(s);
    EXPECT_EQ(c.threshold, 0.35);
    EXPECT_NEAR(c.f1, 0.8, 1e-15);
    // 0.9: 2/3, 0.5: 1/2, 0.2: 4/5.
    const auto e = f1_opt_threshold(ScoredSet{{0.9, 0.5, 0.2}, {1, 0, 1}});
    EXPECT_EQ(e.threshold, 0.2);
    EXPECT_NEAR(e.f1, 0.8, 1e-15);
    // One tied group: 0.2 is the only candidate below 0.9 and predicts all four.
    const auto g = f1_opt_threshold(ScoredSet{{0.9, 0.2, 0.2, 0.2}, {1, 1, 1, 0}});
    EXPECT_EQ(g.threshold, 0.2);
    EXPECT_NEAR(g.f1, 6.0 / 7.0, 1e-15);
}

TEST(F1Threshold, TiedF1PicksLargestThreshold) {
    // 0.9: P 1, R 1/2 -> 2/3; 0.5: 1/2; 0.4: 2/5; 0.3: P 1/2, R 1 -> 2/3.
    const ScoredSet s{{0.9, 0.5, 0.4, 0.3}, {1, 0, 0, 1}};
    const auto c = f1_opt_threshold(s);
    EXPECT_EQ(c.threshold, 0.9);
    EXPECT_NEAR(c.f1, 2.0 / 3.0, 1e-15);
    const auto ref = oracle::sweep_best_f1(s.scores, s.labels);
    EXPECT_EQ(c.threshold, ref.first);
}

TEST(Confusion, CountsAndDerivedMetrics) {
    ScoredSet s;
    for (int i = 0; i < 100; ++i) {
        s.scores.push_back(i < 93 ? 0.9 : 0.1);
        s.labels.push_back(1);
    }
    for (int i = 0; i < 100; ++i) {
        s.scores.push_back(i < 1 ? 0.9 : 0.1);
        s.labels.push_back(0);
    }
    const Confusion c = confusion_at(s, 0.5);
    EXPECT_EQ(c.tp, 93u);
    EXPECT_EQ(c.fp, 1u);
    EXPECT_EQ(c.fn, 7u);
    EXPECT_EQ(c.tn, 99u);
    const ImageMetrics m = classification_metrics(s, 0.5);
    EXPECT_DOUBLE_EQ(m.accuracy, 0.96);
    EXPECT_DOUBLE_EQ(m.precision, 93.0 / 94.0);
    EXPECT_DOUBLE_EQ(m.recall, 0.93);
    const ImageMetrics none = classification_metrics(s, 2.0);
    EXPECT_EQ(none.precision, 0.0);
    EXPECT_EQ(none.f1, 0.0);
}

TEST(Metrics, Errors) {
    EXPECT_THROW(roc_auc(ScoredSet{{0.1, 0.2}, {1, 1}}), MetricUndefinedError);
    EXPECT_THROW(roc_auc(ScoredSet{{0.1}, {0, 1}}), ValidationError);
    EXPECT_THROW(roc_auc(ScoredSet{{0.1, 0.2}, {0, 2}}), ValidationError);
    EXPECT_THROW(roc_auc(ScoredSet{{0.1, std::numeric_limits<double>::quiet_NaN()}, {0, 1}}), ValidationError);
    EXPECT_THROW(pr_auc(ScoredSet{{0.1, 0.2}, {0, 0}}), MetricUndefinedError);
    EXPECT_THROW(f1_opt_threshold(ScoredSet{{0.1}, {0}}), MetricUndefinedError);
}

TEST(Metrics, MatchBruteForceOracles) {
    SeededRng rng(1);
    for (int trial = 0; trial < 200; ++trial) {
        const ScoredSet s = random_set(rng, 2 + rng.uniform_index(199), trial % 2 == 0);
        ASSERT_EQ(roc_auc(s), oracle::pairwise_auc(s.scores, s.labels)) << trial;
        ASSERT_NEAR(pr_auc(s), oracle::sweep_average_precision(s.scores, s.labels), 1e-12) << trial;
        const auto f = f1_opt_threshold(s);
        const auto ref = oracle::sweep_best_f1(s.scores, s.labels);
        ASSERT_EQ(f.threshold, ref.first) << trial;
        ASSERT_NEAR(f.f1, ref.second, 1e-12) << trial;
    }
}

TEST(Metrics, InvariantUnderStrictlyIncreasingTransforms) {
    SeededRng rng(2);
    for (int trial = 0; trial < 100; ++trial) {
        const ScoredSet s = random_set(rng, 2 + rng.uniform_index(199), trial % 2 == 0);
        ScoredSet t = s;
        for (double& x : t.scores) x = std::exp(3.0 * x) - 7.0;
        ASSERT_EQ(roc_auc(t), roc_auc(s));
        ASSERT_EQ(pr_auc(t), pr_auc(s));
        ScoredSet neg = s;
        for (double& x : neg.scores) x = -x;
        ASSERT_NEAR(roc_auc(neg), 1.0 - roc_auc(s), 1e-15);
    }
}

TEST(Metrics, AucInUnitIntervalAndApAtLeastPrevalenceWhenPerfect) {
    SeededRng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        ScoredSet s = random_set(rng, 2 + rng.uniform_index(100), false);
        const double auc = roc_auc(s);
        ASSERT_GE(auc, 0.0);
        ASSERT_LE(auc, 1.0);
        for (std::size_t i = 0; i < s.scores.size(); ++i) s.scores[i] = s.labels[i] + 0.01 * rng.uniform();
        ASSERT_EQ(roc_auc(s), 1.0);
        ASSERT_NEAR(pr_auc(s), 1.0, 1e-15);
    }
}

TEST(PixelMetrics, PoolsAllMaps) {
    Image a(2, 2, {0.9, 0.1, 0.2, 0.3});
    Image b(2, 2, {0.8, 0.7, 0.0, 0.05});
    Mask ma(2, 2), mb(2, 2);
    ma.set(0, 0, true);
    mb.set(0, 0, true);
    mb.set(0, 1, true);
    const std::vector<Image> maps{a, b};
    const std::vector<Mask> truths{ma, mb};
    const PixelMetrics m = pixel_metrics(maps, truths);
    EXPECT_EQ(m.pixel_auroc, 1.0);
    EXPECT_EQ(m.pixel_f1, 1.0);
    EXPECT_EQ(m.threshold, 0.7);
    const std::vector<Mask> empty{Mask(2, 2), Mask(2, 2)};
    EXPECT_THROW(pixel_metrics(maps, empty), MetricUndefinedError);
    const std::vector<Mask> one{ma};
    EXPECT_THROW(pixel_metrics(maps, one), ValidationError);
}

TEST(Aggregate, MeanAndSampleStd) {
    const std::vector<double> v{0.96, 0.97, 0.98};
    const MetricSummary s = summarize(v);
    EXPECT_NEAR(s.mean, 0.97, 1e-15);
    EXPECT_NEAR(s.std, 0.01, 1e-15);
    const std::vector<double> same{0.3, 0.3, 0.3, 0.3};
    EXPECT_EQ(summarize(same).std, 0.0);
    const std::vector<double> one{0.4};
    EXPECT_EQ(summarize(one).std, 0.0);

    MetricsReport r1, r2;
    r1.image = ImageMetrics{0.9, 0.8, 0.7, 0.75, 0.95, 0.9, 0.5};
    r2.image = ImageMetrics{0.8, 0.8, 0.7, 0.75, 0.95, 0.9, 0.4};
    r1.pixel = PixelMetrics{0.9, 0.5, 0.1};
    const std::vector<MetricsReport> reports{r1, r2};
    const RunAggregate agg = aggregate_runs(reports);
    EXPECT_EQ(agg.runs, 2u);
    EXPECT_EQ(agg.metrics.count("pixel_auroc"), 0u);
    EXPECT_NEAR(agg.metrics.at("accuracy").mean, 0.85, 1e-15);
    EXPECT_NEAR(agg.metrics.at("accuracy").std, std::sqrt(0.005), 1e-15);
    EXPECT_EQ(agg.metrics.at("roc_auc").std, 0.0);
}
