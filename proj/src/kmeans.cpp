#include "sarbench/errors.hpp"
#include "sarbench/normalgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sarbench {

namespace {

// Nearest centroid per value, ties to the lower index. Returns true if any
// assignment changed.
bool assign_nearest(std::span<const double> values, const std::vector<double>& centroids,
                    std::vector<int>& assignments) {
    bool changed = false;
    const int k = static_cast<int>(centroids.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        int best = 0;
        double best_d = std::abs(values[i] - centroids[0]);
        for (int j = 1; j < k; ++j) {
            const double d = std::abs(values[i] - centroids[j]);
            if (d < best_d) {
                best_d = d;
                best = j;
            }
        }
        if (assignments[i] != best) {
            assignments[i] = best;
            changed = true;
        }
    }
    return changed;
}

double inertia_of(std::span<const double> values, const std::vector<double>& centroids,
                  const std::vector<int>& assignments) {
    double total = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double d = values[i] - centroids[static_cast<std::size_t>(assignments[i])];
        total += d * d;
    }
    return total;
}

// Centroids become cluster means; an empty cluster keeps its previous centroid.
void update_centroids(std::span<const double> values, const std::vector<int>& assignments,
                      std::vector<double>& centroids) {
    std::vector<double> sums(centroids.size(), 0.0);
    std::vector<std::size_t> counts(centroids.size(), 0);
    for (std::size_t i = 0; i < values.size(); ++i) {
        sums[static_cast<std::size_t>(assignments[i])] += values[i];
        ++counts[static_cast<std::size_t>(assignments[i])];
    }
    for (std::size_t j = 0; j < centroids.size(); ++j) {
        if (counts[j] > 0) centroids[j] = sums[j] / static_cast<double>(counts[j]);
    }
}

}  // namespace

KMeansResult kmeans_1d(std::span<const double> values, int k, int n_init, int max_iter,
                       SeededRng& rng, const KMeansObserver& observer) {
    if (values.empty()) throw DegenerateInputError("kmeans_1d: empty input");
    if (k < 1) throw DegenerateInputError("kmeans_1d: k must be >= 1");
    if (n_init < 1 || max_iter < 1) {
        throw DegenerateInputError("kmeans_1d: n_init and max_iter must be >= 1");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw DegenerateInputError("kmeans_1d: non-finite value at index " +
                                       std::to_string(i));
        }
    }

    std::vector<double> distinct(values.begin(), values.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (static_cast<std::size_t>(k) > distinct.size()) {
        throw DegenerateInputError("kmeans_1d: k = " + std::to_string(k) + " exceeds " +
                                   std::to_string(distinct.size()) + " distinct values");
    }

    KMeansResult best;
    best.inertia = std::numeric_limits<double>::infinity();

    for (int restart = 0; restart < n_init; ++restart) {
        std::vector<double> centroids;
        centroids.reserve(static_cast<std::size_t>(k));
        for (std::size_t idx : rng.sample_without_replacement(distinct.size(),
                                                              static_cast<std::size_t>(k))) {
            centroids.push_back(distinct[idx]);
        }
        std::vector<int> assignments(values.size(), -1);
        assign_nearest(values, centroids, assignments);
        if (observer) observer(restart, 0, inertia_of(values, centroids, assignments));

        int iter = 0;
        while (iter < max_iter) {
            ++iter;
            update_centroids(values, assignments, centroids);
            const bool changed = assign_nearest(values, centroids, assignments);
            if (observer) observer(restart, iter, inertia_of(values, centroids, assignments));
            if (!changed) break;
        }

        // Ascending centroids, then reassign so labels follow the sorted order.
        std::sort(centroids.begin(), centroids.end());
        assign_nearest(values, centroids, assignments);
        const double inertia = inertia_of(values, centroids, assignments);
        if (inertia < best.inertia) {
            best.centroids = std::move(centroids);
            best.assignments = std::move(assignments);
            best.inertia = inertia;
            best.iterations = iter;
        }
    }
    return best;
}

}  // namespace sarbench
