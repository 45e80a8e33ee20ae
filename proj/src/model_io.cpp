#include "sarbench/model_io.hpp"

#include "sarbench/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace sarbench {

namespace fs = std::filesystem;

namespace {

constexpr const char* kMagic = "sarbench-model";
constexpr int kFormatVersion = 1;

void put(std::ostream& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), " %.17g", v);
    out << buf;
}

class Reader {
public:
    explicit Reader(std::istream& in, fs::path path) : in_(in), path_(std::move(path)) {}

    void expect(const std::string& word) {
        const std::string got = token();
        if (got != word) fail("expected '" + word + "', found '" + got + "'");
    }

    std::string token() {
        std::string t;
        if (!(in_ >> t)) fail("unexpected end of file");
        return t;
    }

    template <typename T>
    T number() {
        const std::string t = token();
        std::istringstream ss(t);
        T v{};
        if (!(ss >> v)) fail("malformed number '" + t + "'");
        return v;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw DecodeError(path_.string() + ": " + what);
    }

private:
    std::istream& in_;
    fs::path path_;
};

}  // namespace

ScoreGrid StoredModel::score(const Image& img) const {
    const FeatureMap fm = take_channels(extract_features(img, features), channels);
    if (kind == ModelKind::Padim) return padim_score(std::get<GaussianField>(state), fm);
    return dfm_score(std::get<PcaModel>(state), fm);
}

void save_model(const fs::path& path, const StoredModel& model) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << kMagic << ' ' << kFormatVersion << '\n';
    out << "kind " << to_string(model.kind) << '\n';
    out << "windows " << model.features.window_sizes.size();
    for (int w : model.features.window_sizes) out << ' ' << w;
    out << "\nstride " << model.features.stride << '\n';
    out << "channels " << model.channels.size();
    for (int c : model.channels) out << ' ' << c;
    out << '\n';

    if (model.kind == ModelKind::Padim) {
        const auto& f = std::get<GaussianField>(model.state);
        out << "grid " << f.grid_h << ' ' << f.grid_w << ' ' << f.channels << '\n';
        out << "epsilon";
        put(out, f.epsilon);
        out << '\n';
        for (std::size_t cell = 0; cell < f.means.size(); ++cell) {
            out << "cell";
            for (double v : f.means[cell]) put(out, v);
            for (double v : f.covariances[cell].data()) put(out, v);
            out << '\n';
        }
    } else {
        const auto& p = std::get<PcaModel>(model.state);
        out << "dim " << p.channels() << '\n';
        out << "ratio";
        put(out, p.retained_ratio);
        out << "\nmean";
        for (double v : p.mean) put(out, v);
        out << "\neigenvalues";
        for (double v : p.eigenvalues) put(out, v);
        out << "\nrank " << p.rank() << '\n';
        for (const auto& axis : p.axes) {
            out << "axis";
            for (double v : axis) put(out, v);
            out << '\n';
        }
    }
    if (!out) throw IoError("write failed for " + path.string());
}

StoredModel load_model(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    Reader rd(in, path);
    rd.expect(kMagic);
    const int version = rd.number<int>();
    if (version != kFormatVersion) rd.fail("unsupported format version " + std::to_string(version));

    StoredModel model;
    rd.expect("kind");
    try {
        model.kind = parse_model(rd.token());
    } catch (const ConfigError& e) {
        rd.fail(e.what());
    }
    rd.expect("windows");
    const auto nw = rd.number<std::size_t>();
    model.features.window_sizes.clear();
    for (std::size_t i = 0; i < nw; ++i) model.features.window_sizes.push_back(rd.number<int>());
    rd.expect("stride");
    model.features.stride = rd.number<int>();
    rd.expect("channels");
    const auto nc = rd.number<std::size_t>();
    for (std::size_t i = 0; i < nc; ++i) model.channels.push_back(rd.number<int>());
    try {
        model.features.validate();
    } catch (const ConfigError& e) {
        rd.fail(e.what());
    }
    for (int c : model.channels) {
        if (c < 0 || c >= model.features.channel_count()) rd.fail("channel index out of range");
    }

    if (model.kind == ModelKind::Padim) {
        GaussianField f;
        rd.expect("grid");
        f.grid_h = rd.number<int>();
        f.grid_w = rd.number<int>();
        f.channels = rd.number<int>();
        if (f.grid_h <= 0 || f.grid_w <= 0 || f.channels != static_cast<int>(nc)) {
            rd.fail("inconsistent grid header");
        }
        rd.expect("epsilon");
        f.epsilon = rd.number<double>();
        const int C = f.channels;
        const std::size_t cells = static_cast<std::size_t>(f.grid_h) * f.grid_w;
        for (std::size_t cell = 0; cell < cells; ++cell) {
            rd.expect("cell");
            std::vector<double> mu(static_cast<std::size_t>(C));
            for (auto& v : mu) v = rd.number<double>();
            linalg::SquareMatrix cov(C);
            for (auto& v : cov.data()) v = rd.number<double>();
            try {
                f.cholesky.push_back(linalg::cholesky(cov));
            } catch (const DegenerateInputError& e) {
                rd.fail(e.what());
            }
            f.means.push_back(std::move(mu));
            f.covariances.push_back(std::move(cov));
        }
        model.state = std::move(f);
    } else {
        PcaModel p;
        rd.expect("dim");
        const int C = rd.number<int>();
        if (C != static_cast<int>(nc)) rd.fail("inconsistent dimension");
        rd.expect("ratio");
        p.retained_ratio = rd.number<double>();
        rd.expect("mean");
        for (int i = 0; i < C; ++i) p.mean.push_back(rd.number<double>());
        rd.expect("eigenvalues");
        for (int i = 0; i < C; ++i) p.eigenvalues.push_back(rd.number<double>());
        rd.expect("rank");
        const int r = rd.number<int>();
        if (r < 1 || r > C) rd.fail("rank out of range");
        for (int j = 0; j < r; ++j) {
            rd.expect("axis");
            std::vector<double> axis(static_cast<std::size_t>(C));
            for (auto& v : axis) v = rd.number<double>();
            p.axes.push_back(std::move(axis));
        }
        model.state = std::move(p);
    }
    return model;
}

}  // namespace sarbench
