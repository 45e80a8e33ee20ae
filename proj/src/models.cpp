#include "sarbench/models.hpp"

#include "sarbench/errors.hpp"

#include <algorithm>
#include <cmath>

namespace sarbench {

namespace {

void require_same_shapes(std::span<const FeatureMap> maps, const char* what) {
    for (const auto& fm : maps) {
        if (!fm.same_shape(maps.front())) {
            throw ValidationError(std::string(what) + ": training feature maps differ in shape");
        }
    }
}

}  // namespace

// =============================================================================
// Gaussian field
// =============================================================================

GaussianField padim_fit(std::span<const FeatureMap> train, double epsilon) {
    if (train.size() < 2) throw ValidationError("padim_fit: at least 2 training maps required");
    require_same_shapes(train, "padim_fit");

    const auto& shape = train.front();
    const int C = shape.channels();
    const int cells = shape.cells();
    const double n = static_cast<double>(train.size());
    const std::size_t plane = static_cast<std::size_t>(cells);

    GaussianField field;
    field.channels = C;
    field.grid_h = shape.grid_h();
    field.grid_w = shape.grid_w();
    field.epsilon = epsilon;
    field.means.resize(plane);
    field.covariances.resize(plane);
    field.cholesky.resize(plane);

    std::vector<double> centered(static_cast<std::size_t>(C));
    for (int cell = 0; cell < cells; ++cell) {
        std::vector<double> mu(static_cast<std::size_t>(C), 0.0);
        for (const auto& fm : train) {
            const auto d = fm.data();
            for (int ch = 0; ch < C; ++ch) mu[ch] += d[ch * plane + cell];
        }
        for (auto& m : mu) m /= n;

        linalg::SquareMatrix cov(C);
        for (const auto& fm : train) {
            const auto d = fm.data();
            for (int ch = 0; ch < C; ++ch) centered[ch] = d[ch * plane + cell] - mu[ch];
            for (int i = 0; i < C; ++i) {
                for (int j = 0; j <= i; ++j) cov(i, j) += centered[i] * centered[j];
            }
        }
        for (int i = 0; i < C; ++i) {
            for (int j = 0; j <= i; ++j) {
                cov(i, j) /= (n - 1.0);
                cov(j, i) = cov(i, j);
            }
            cov(i, i) += epsilon;
        }
        try {
            field.cholesky[cell] = linalg::cholesky(cov);
        } catch (const DegenerateInputError& e) {
            throw DegenerateInputError("padim_fit: cell " + std::to_string(cell) + ": " + e.what());
        }
        field.means[cell] = std::move(mu);
        field.covariances[cell] = std::move(cov);
    }
    return field;
}

ScoreGrid padim_score(const GaussianField& field, const FeatureMap& fm) {
    if (fm.channels() != field.channels || fm.grid_h() != field.grid_h ||
        fm.grid_w() != field.grid_w) {
        throw ValidationError("padim_score: feature map shape does not match the fitted field");
    }
    ScoreGrid out{field.grid_h, field.grid_w, std::vector<double>(static_cast<std::size_t>(fm.cells()))};
    const auto d = fm.data();
    const std::size_t plane = static_cast<std::size_t>(fm.cells());
    std::vector<double> diff(static_cast<std::size_t>(field.channels));
    for (std::size_t cell = 0; cell < plane; ++cell) {
        for (int ch = 0; ch < field.channels; ++ch) {
            diff[ch] = d[ch * plane + cell] - field.means[cell][ch];
        }
        const auto y = linalg::forward_substitute(field.cholesky[cell], diff);
        double ss = 0.0;
        for (double v : y) ss += v * v;
        out.values[cell] = std::sqrt(ss);
    }
    return out;
}

// =============================================================================
// PCA feature model
// =============================================================================

PcaModel pca_fit(std::span<const std::vector<double>> samples, double retained_ratio) {
    if (samples.size() < 2) throw ValidationError("dfm_fit: at least 2 feature vectors required");
    if (!(retained_ratio > 0.0 && retained_ratio <= 1.0)) {
        throw ConfigError("dfm_fit: retained variance ratio must lie in (0, 1]");
    }
    const int C = static_cast<int>(samples.front().size());
    if (C < 1) throw ValidationError("dfm_fit: empty feature vectors");
    for (const auto& s : samples) {
        if (static_cast<int>(s.size()) != C) throw ValidationError("dfm_fit: ragged samples");
    }

    const double n = static_cast<double>(samples.size());
    PcaModel model;
    model.retained_ratio = retained_ratio;
    model.mean.assign(static_cast<std::size_t>(C), 0.0);
    for (const auto& s : samples) {
        for (int i = 0; i < C; ++i) model.mean[i] += s[i];
    }
    for (auto& m : model.mean) m /= n;

    linalg::SquareMatrix cov(C);
    std::vector<double> centered(static_cast<std::size_t>(C));
    for (const auto& s : samples) {
        for (int i = 0; i < C; ++i) centered[i] = s[i] - model.mean[i];
        for (int i = 0; i < C; ++i) {
            for (int j = 0; j <= i; ++j) cov(i, j) += centered[i] * centered[j];
        }
    }
    for (int i = 0; i < C; ++i) {
        for (int j = 0; j <= i; ++j) {
            cov(i, j) /= (n - 1.0);
            cov(j, i) = cov(i, j);
        }
    }

    const auto eig = linalg::symmetric_eigen(cov);
    model.eigenvalues = eig.values;

    double total = 0.0;
    for (double v : eig.values) total += std::max(0.0, v);
    int rank = 1;
    if (total > 0.0) {
        double cumulative = 0.0;
        for (int j = 0; j < C; ++j) {
            cumulative += std::max(0.0, eig.values[j]);
            if (cumulative / total >= retained_ratio) {
                rank = j + 1;
                break;
            }
            rank = j + 1;
        }
    }

    for (int j = 0; j < rank; ++j) {
        std::vector<double> axis(static_cast<std::size_t>(C));
        int pivot = 0;
        for (int i = 0; i < C; ++i) {
            axis[i] = eig.vectors(i, j);
            if (std::abs(axis[i]) > std::abs(axis[pivot])) pivot = i;
        }
        if (axis[pivot] < 0.0) {
            for (auto& a : axis) a = -a;
        }
        model.axes.push_back(std::move(axis));
    }
    return model;
}

PcaModel dfm_fit(std::span<const FeatureMap> train, double retained_ratio) {
    if (train.size() < 2) throw ValidationError("dfm_fit: at least 2 training maps required");
    require_same_shapes(train, "dfm_fit");
    std::vector<std::vector<double>> pooled;
    pooled.reserve(train.size() * static_cast<std::size_t>(train.front().cells()));
    for (const auto& fm : train) {
        for (int cell = 0; cell < fm.cells(); ++cell) pooled.push_back(fm.vector_at(cell));
    }
    return pca_fit(pooled, retained_ratio);
}

double pca_residual(const PcaModel& model, std::span<const double> x) {
    const std::size_t C = model.mean.size();
    std::vector<double> residual(C);
    for (std::size_t i = 0; i < C; ++i) residual[i] = x[i] - model.mean[i];
    const std::vector<double> centered = residual;
    for (const auto& axis : model.axes) {
        double proj = 0.0;
        for (std::size_t i = 0; i < C; ++i) proj += axis[i] * centered[i];
        for (std::size_t i = 0; i < C; ++i) residual[i] -= proj * axis[i];
    }
    double ss = 0.0;
    for (double r : residual) ss += r * r;
    return ss;
}

ScoreGrid dfm_score(const PcaModel& model, const FeatureMap& fm) {
    if (fm.channels() != model.channels()) {
        throw ValidationError("dfm_score: feature map has " + std::to_string(fm.channels()) +
                              " channels, model expects " + std::to_string(model.channels()));
    }
    ScoreGrid out{fm.grid_h(), fm.grid_w(), std::vector<double>(static_cast<std::size_t>(fm.cells()))};
    for (int cell = 0; cell < fm.cells(); ++cell) {
        out.values[cell] = pca_residual(model, fm.vector_at(cell));
    }
    return out;
}

// =============================================================================
// Anomaly map post-processing
// =============================================================================

Image bilinear_upsample(const ScoreGrid& grid, int height, int width) {
    if (grid.grid_h <= 0 || grid.grid_w <= 0 || grid.values.empty()) {
        throw ValidationError("postprocess_map: empty score grid");
    }
    Image out(height, width);
    const double sy = static_cast<double>(grid.grid_h) / height;
    const double sx = static_cast<double>(grid.grid_w) / width;
    for (int y = 0; y < height; ++y) {
        const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, grid.grid_h - 1.0);
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, grid.grid_h - 1);
        const double wy = fy - y0;
        for (int x = 0; x < width; ++x) {
            const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, grid.grid_w - 1.0);
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, grid.grid_w - 1);
            const double wx = fx - x0;
            const double top = grid.at(y0, x0) + wx * (grid.at(y0, x1) - grid.at(y0, x0));
            const double bottom = grid.at(y1, x0) + wx * (grid.at(y1, x1) - grid.at(y1, x0));
            out.at(y, x) = top + wy * (bottom - top);
        }
    }
    return out;
}

Image gaussian_blur(const Image& img, double sigma) {
    if (!(sigma > 0.0)) return img;
    const int radius = static_cast<int>(std::ceil(4.0 * sigma));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    double norm = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double w = std::exp(-0.5 * (i * i) / (sigma * sigma));
        kernel[static_cast<std::size_t>(i + radius)] = w;
        norm += w;
    }
    for (auto& w : kernel) w /= norm;

    const int H = img.height();
    const int W = img.width();
    Image tmp(H, W);
    for (int r = 0; r < H; ++r) {
        for (int c = 0; c < W; ++c) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                acc += kernel[static_cast<std::size_t>(i + radius)] *
                       img.at(r, std::clamp(c + i, 0, W - 1));
            }
            tmp.at(r, c) = acc;
        }
    }
    Image out(H, W);
    for (int r = 0; r < H; ++r) {
        for (int c = 0; c < W; ++c) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                acc += kernel[static_cast<std::size_t>(i + radius)] *
                       tmp.at(std::clamp(r + i, 0, H - 1), c);
            }
            out.at(r, c) = acc;
        }
    }
    return out;
}

Image postprocess_map(const ScoreGrid& grid, int height, int width, double sigma) {
    Image map = gaussian_blur(bilinear_upsample(grid, height, width), sigma);
    for (double& v : map.pixels()) v = std::max(0.0, v);
    return map;
}

double image_score(const Image& map) {
    if (map.empty()) throw ValidationError("image_score: empty map");
    const auto px = map.pixels();
    return *std::max_element(px.begin(), px.end());
}

}  // namespace sarbench
