/**
 * @file model_io.hpp
 * @brief Text serialization of fitted models.
 *
 * Format (whitespace-separated tokens, doubles in %.17g so they round-trip):
 *
 *   sarbench-model 1
 *   kind padim|dfm
 *   windows <n> <w1> ... <wn>
 *   stride <s>
 *   channels <k> <c1> ... <ck>          channel subset applied before scoring
 *   padim: grid <gh> <gw> <C>
 *          epsilon <e>
 *          cell <mean x C> <regularized covariance, C*C row-major>   (gh*gw lines)
 *   dfm:   dim <C>
 *          ratio <rho>
 *          mean <C values>
 *          eigenvalues <C values>
 *          rank <r>
 *          axis <C values>                                           (r lines)
 *
 * The Cholesky factor is recomputed on load.
 */
#pragma once

#include "sarbench/bench.hpp"
#include "sarbench/models.hpp"

#include <filesystem>
#include <variant>
#include <vector>

namespace sarbench {

struct StoredModel {
    ModelKind kind = ModelKind::Padim;
    FeatureConfig features;
    std::vector<int> channels;
    std::variant<GaussianField, PcaModel> state;

    /// Extracts features, applies the channel subset and scores one image.
    ScoreGrid score(const Image& img) const;
};

void save_model(const std::filesystem::path& path, const StoredModel& model);
StoredModel load_model(const std::filesystem::path& path);

}  // namespace sarbench
