#include "sarbench/bench.hpp"
#include "sarbench/errors.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

namespace sarbench {

namespace fs = std::filesystem;

namespace {

void reject_unknown_keys(const YAML::Node& node, const std::set<std::string>& allowed,
                         const std::string& where) {
    if (!node.IsMap()) throw ConfigError(where + ": expected a mapping");
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

template <typename T>
void read(const YAML::Node& node, const char* key, T& out, const std::string& where) {
    if (!node[key]) return;
    try {
        out = node[key].as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError(where + "." + key + ": invalid value");
    }
}

SceneConfig parse_scene(const YAML::Node& node) {
    SceneConfig s = SyntheticSpec::default_scene();
    reject_unknown_keys(node, {"height", "width", "background_mean", "background_std",
                               "speckle_looks"},
                        "dataset.synthetic.scene");
    read(node, "height", s.height, "scene");
    read(node, "width", s.width, "scene");
    read(node, "background_mean", s.background_mean, "scene");
    read(node, "background_std", s.background_std, "scene");
    read(node, "speckle_looks", s.speckle_looks, "scene");
    return s;
}

AnomalyRanges parse_anomalies(const YAML::Node& node) {
    AnomalyRanges a = SyntheticSpec::default_anomalies();
    reject_unknown_keys(node, {"semi_axis_min", "semi_axis_max", "intensity_boost",
                               "shadow_offset_factor", "shadow_attenuation"},
                        "dataset.synthetic.anomalies");
    read(node, "semi_axis_min", a.semi_axis_min, "anomalies");
    read(node, "semi_axis_max", a.semi_axis_max, "anomalies");
    read(node, "intensity_boost", a.intensity_boost, "anomalies");
    if (node["shadow_offset_factor"]) {
        if (node["shadow_offset_factor"].IsNull()) {
            a.shadow_offset_factor.reset();
        } else {
            double f = 0.0;
            read(node, "shadow_offset_factor", f, "anomalies");
            a.shadow_offset_factor = f;
        }
    }
    read(node, "shadow_attenuation", a.shadow_attenuation, "anomalies");
    return a;
}

SyntheticSpec parse_synthetic(const YAML::Node& node) {
    SyntheticSpec s;
    reject_unknown_keys(node, {"train_normal", "test_normal", "test_anomalous", "seed", "scene",
                               "anomalies"},
                        "dataset.synthetic");
    read(node, "train_normal", s.train_normal, "synthetic");
    read(node, "test_normal", s.test_normal, "synthetic");
    read(node, "test_anomalous", s.test_anomalous, "synthetic");
    read(node, "seed", s.seed, "synthetic");
    if (node["scene"]) s.scene = parse_scene(node["scene"]);
    if (node["anomalies"]) s.anomalies = parse_anomalies(node["anomalies"]);
    return s;
}

NormalGenConfig parse_normalgen(const YAML::Node& node, bool& enabled) {
    NormalGenConfig n;
    reject_unknown_keys(node, {"enabled", "target_k", "shadow_k", "n_init", "max_iter",
                               "shadow_rule", "seed"},
                        "normalgen");
    enabled = true;
    read(node, "enabled", enabled, "normalgen");
    read(node, "target_k", n.target_k, "normalgen");
    read(node, "shadow_k", n.shadow_k, "normalgen");
    read(node, "n_init", n.n_init, "normalgen");
    read(node, "max_iter", n.max_iter, "normalgen");
    read(node, "seed", n.seed, "normalgen");
    if (node["shadow_rule"]) n.shadow_rule = parse_shadow_rule(node["shadow_rule"].as<std::string>());
    return n;
}

}  // namespace

const char* to_string(ModelKind kind) noexcept {
    return kind == ModelKind::Padim ? "padim" : "dfm";
}

ModelKind parse_model(const std::string& name) {
    if (name == "padim") return ModelKind::Padim;
    if (name == "dfm") return ModelKind::Dfm;
    throw ConfigError("unknown model '" + name + "' (expected padim|dfm)");
}

bool is_deterministic(ModelKind kind) noexcept { return kind == ModelKind::Dfm; }

void BenchConfig::validate() const {
    if (dataset_dir.has_value() == synthetic.has_value()) {
        throw ConfigError("dataset: specify exactly one of 'directory' or 'synthetic'");
    }
    if (runs < 1) throw ConfigError("runs must be >= 1");
    if (models.empty()) throw ConfigError("models: at least one model is required");
    for (std::size_t i = 0; i < models.size(); ++i) {
        for (std::size_t j = i + 1; j < models.size(); ++j) {
            if (models[i] == models[j]) throw ConfigError("models: duplicate entry");
        }
    }
    if (!image_level && !pixel_level) throw ConfigError("tasks: at least one task is required");
    features.validate();
    if (!(padim_epsilon >= 0.0)) throw ConfigError("padim.epsilon must be >= 0");
    if (!(dfm_retained_variance > 0.0 && dfm_retained_variance <= 1.0)) {
        throw ConfigError("dfm.retained_variance must lie in (0, 1]");
    }
    if (!(smoothing_sigma >= 0.0)) throw ConfigError("postprocess.sigma must be >= 0");
    if (panels < 0) throw ConfigError("panels must be >= 0");
    if (normalgen) normalgen->validate();
    if (synthetic) {
        if (synthetic->train_normal < 2) throw ConfigError("synthetic.train_normal must be >= 2");
        if (synthetic->test_normal < 0 || synthetic->test_anomalous < 0) {
            throw ConfigError("synthetic test counts must be >= 0");
        }
        synthetic->scene.validate();
        const int max_w = features.window_sizes.back();
        if (synthetic->scene.height < max_w || synthetic->scene.width < max_w) {
            throw ConfigError("synthetic scene is smaller than the largest feature window");
        }
    }
}

fs::path BenchConfig::resolved_dataset_dir() const {
    if (!dataset_dir) return {};
    const fs::path p(*dataset_dir);
    return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
}

fs::path BenchConfig::resolved_output_dir() const {
    return output_dir.is_absolute() || base_dir.empty() ? output_dir : base_dir / output_dir;
}

BenchConfig parse_config(const std::string& yaml_text, const fs::path& base_dir) {
    YAML::Node root;
    try {
        root = YAML::Load(yaml_text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("config is not valid YAML: ") + e.what());
    }
    reject_unknown_keys(root, {"dataset", "models", "runs", "base_seed", "tasks", "features",
                               "padim", "dfm", "postprocess", "normalgen", "panels",
                               "output_dir"},
                        "config");

    BenchConfig cfg;
    cfg.base_dir = base_dir;
    if (!root["dataset"]) throw ConfigError("config: missing 'dataset'");
    const YAML::Node ds = root["dataset"];
    reject_unknown_keys(ds, {"directory", "synthetic"}, "dataset");
    if (ds["directory"]) cfg.dataset_dir = ds["directory"].as<std::string>();
    if (ds["synthetic"]) cfg.synthetic = parse_synthetic(ds["synthetic"]);

    if (root["models"]) {
        cfg.models.clear();
        for (const auto& m : root["models"]) cfg.models.push_back(parse_model(m.as<std::string>()));
    }
    read(root, "runs", cfg.runs, "config");
    read(root, "base_seed", cfg.base_seed, "config");
    if (root["tasks"]) {
        cfg.image_level = cfg.pixel_level = false;
        for (const auto& t : root["tasks"]) {
            const auto name = t.as<std::string>();
            if (name == "image_level") cfg.image_level = true;
            else if (name == "pixel_level") cfg.pixel_level = true;
            else throw ConfigError("tasks: unknown task '" + name + "'");
        }
    }
    if (const YAML::Node f = root["features"]) {
        reject_unknown_keys(f, {"window_sizes", "stride", "select_k"}, "features");
        read(f, "window_sizes", cfg.features.window_sizes, "features");
        read(f, "stride", cfg.features.stride, "features");
        if (f["select_k"]) cfg.features.select_k = f["select_k"].as<int>();
    }
    if (const YAML::Node p = root["padim"]) {
        reject_unknown_keys(p, {"epsilon"}, "padim");
        read(p, "epsilon", cfg.padim_epsilon, "padim");
    }
    if (const YAML::Node d = root["dfm"]) {
        reject_unknown_keys(d, {"retained_variance"}, "dfm");
        read(d, "retained_variance", cfg.dfm_retained_variance, "dfm");
    }
    if (const YAML::Node pp = root["postprocess"]) {
        reject_unknown_keys(pp, {"sigma"}, "postprocess");
        read(pp, "sigma", cfg.smoothing_sigma, "postprocess");
    }
    if (root["normalgen"]) {
        bool enabled = false;
        NormalGenConfig n = parse_normalgen(root["normalgen"], enabled);
        if (enabled) cfg.normalgen = n;
    }
    read(root, "panels", cfg.panels, "config");
    if (root["output_dir"]) cfg.output_dir = root["output_dir"].as<std::string>();

    cfg.validate();
    return cfg;
}

BenchConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.parent_path());
}

nlohmann::json config_to_json(const BenchConfig& cfg) {
    using nlohmann::json;
    json j;
    if (cfg.dataset_dir) {
        j["dataset"] = {{"directory", *cfg.dataset_dir}};
    } else {
        const auto& s = *cfg.synthetic;
        json anomalies = {{"semi_axis_min", s.anomalies.semi_axis_min},
                          {"semi_axis_max", s.anomalies.semi_axis_max},
                          {"intensity_boost", s.anomalies.intensity_boost},
                          {"shadow_attenuation", s.anomalies.shadow_attenuation}};
        anomalies["shadow_offset_factor"] =
            s.anomalies.shadow_offset_factor ? json(*s.anomalies.shadow_offset_factor) : json(nullptr);
        j["dataset"] = {{"synthetic",
                         {{"train_normal", s.train_normal},
                          {"test_normal", s.test_normal},
                          {"test_anomalous", s.test_anomalous},
                          {"seed", s.seed},
                          {"scene",
                           {{"height", s.scene.height},
                            {"width", s.scene.width},
                            {"background_mean", s.scene.background_mean},
                            {"background_std", s.scene.background_std},
                            {"speckle_looks", s.scene.speckle_looks}}},
                          {"anomalies", anomalies}}}};
    }
    json models = json::array();
    for (auto m : cfg.models) models.push_back(to_string(m));
    j["models"] = models;
    j["runs"] = cfg.runs;
    j["base_seed"] = cfg.base_seed;
    json tasks = json::array();
    if (cfg.image_level) tasks.push_back("image_level");
    if (cfg.pixel_level) tasks.push_back("pixel_level");
    j["tasks"] = tasks;
    j["features"] = {{"window_sizes", cfg.features.window_sizes},
                     {"stride", cfg.features.stride},
                     {"select_k", cfg.features.effective_select_k()}};
    j["padim"] = {{"epsilon", cfg.padim_epsilon}};
    j["dfm"] = {{"retained_variance", cfg.dfm_retained_variance}};
    j["postprocess"] = {{"sigma", cfg.smoothing_sigma}};
    if (cfg.normalgen) {
        const auto& n = *cfg.normalgen;
        j["normalgen"] = {{"target_k", n.target_k},   {"shadow_k", n.shadow_k},
                          {"n_init", n.n_init},       {"max_iter", n.max_iter},
                          {"shadow_rule", to_string(n.shadow_rule)}, {"seed", n.seed}};
    } else {
        j["normalgen"] = nullptr;
    }
    j["panels"] = cfg.panels;
    return j;
}

}  // namespace sarbench
