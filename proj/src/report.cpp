#include "sarbench/bench.hpp"
#include "sarbench/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace sarbench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Column {
    const char* key;
    const char* title;
};

constexpr Column kImageColumns[] = {
    {"accuracy", "Accuracy (%)"}, {"precision", "Precision (%)"}, {"recall", "Recall (%)"},
    {"f1", "F1-Score (%)"},       {"roc_auc", "ROC AUC (%)"},     {"pr_auc", "PR AUC (%)"}};

constexpr Column kPixelColumns[] = {{"pixel_auroc", "Pixel AUROC (%)"},
                                    {"pixel_f1", "Pixel F1 Score (%)"},
                                    {"roc_auc", "Image AUROC (%)"},
                                    {"f1", "Image F1 Score (%)"}};

std::string display_name(const std::string& model) {
    if (model == "padim") return "PaDiM";
    if (model == "dfm") return "DFM";
    return model;
}

json image_to_json(const ImageMetrics& m) {
    return {{"accuracy", m.accuracy}, {"precision", m.precision}, {"recall", m.recall},
            {"f1", m.f1},             {"roc_auc", m.roc_auc},     {"pr_auc", m.pr_auc},
            {"threshold", m.threshold}};
}

json pixel_to_json(const PixelMetrics& m) {
    return {{"pixel_auroc", m.pixel_auroc}, {"pixel_f1", m.pixel_f1}, {"threshold", m.threshold}};
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

// Markdown table over the columns whose metric is present for at least one model.
void append_table(std::ostringstream& md, const json& models, const Column* begin,
                  const Column* end) {
    std::vector<const Column*> cols;
    for (const Column* c = begin; c != end; ++c) {
        for (const auto& m : models) {
            if (m["aggregate"]["metrics"].contains(c->key)) {
                cols.push_back(c);
                break;
            }
        }
    }
    if (cols.empty()) return;

    md << "| Model |";
    for (const Column* c : cols) md << ' ' << c->title << " |";
    md << "\n|---|";
    for (std::size_t i = 0; i < cols.size(); ++i) md << "---|";
    md << '\n';

    std::vector<double> best(cols.size(), -1.0);
    for (std::size_t i = 0; i < cols.size(); ++i) {
        for (const auto& m : models) {
            const auto& metrics = m["aggregate"]["metrics"];
            if (metrics.contains(cols[i]->key)) {
                best[i] = std::max(best[i], metrics[cols[i]->key]["mean"].get<double>());
            }
        }
    }

    for (const auto& m : models) {
        const auto& metrics = m["aggregate"]["metrics"];
        const bool show_std =
            !m["deterministic"].get<bool>() && m["aggregate"]["runs"].get<int>() > 1;
        md << "| " << display_name(m["model"].get<std::string>()) << " |";
        for (std::size_t i = 0; i < cols.size(); ++i) {
            if (!metrics.contains(cols[i]->key)) {
                md << " n/a |";
                continue;
            }
            const double mean = metrics[cols[i]->key]["mean"].get<double>();
            const double sd = metrics[cols[i]->key]["std"].get<double>();
            const std::string cell = format_cell(mean, sd, show_std);
            if (mean == best[i]) {
                md << " **" << cell << "** |";
            } else {
                md << ' ' << cell << " |";
            }
        }
        md << '\n';
    }
    md << '\n';
}

}  // namespace

std::string format_cell(double mean, double std, bool show_std) {
    char buf[64];
    if (show_std) {
        std::snprintf(buf, sizeof(buf), "%.2f ± %.2f", mean * 100.0, std * 100.0);
    } else {
        std::snprintf(buf, sizeof(buf), "%.2f", mean * 100.0);
    }
    return buf;
}

json report_to_json(const RunReport& report) {
    json j;
    j["toolkit"] = "sarbench";
    j["version"] = report.version;
    j["config"] = report.config;
    j["dataset"] = {{"name", report.dataset_name},
                    {"train", report.train_count},
                    {"test_normal", report.test_normal},
                    {"test_anomalous", report.test_anomalous}};
    json models = json::array();
    for (const auto& mr : report.models) {
        json runs = json::array();
        for (std::size_t r = 0; r < mr.runs.size(); ++r) {
            const auto& run = mr.runs[r];
            json jr = {{"run", r}, {"seed", mr.seeds.at(r)}, {"channels", mr.channels.at(r)}};
            jr["image"] = run.image ? image_to_json(*run.image) : json(nullptr);
            jr["pixel"] = run.pixel ? pixel_to_json(*run.pixel) : json(nullptr);
            jr["notes"] = run.notes;
            runs.push_back(std::move(jr));
        }
        json metrics = json::object();
        for (const auto& [name, s] : mr.aggregate.metrics) {
            metrics[name] = {{"mean", s.mean}, {"std", s.std}};
        }
        models.push_back({{"model", to_string(mr.model)},
                          {"deterministic", is_deterministic(mr.model)},
                          {"runs", std::move(runs)},
                          {"aggregate", {{"runs", mr.aggregate.runs}, {"metrics", metrics}}}});
    }
    j["models"] = std::move(models);
    return j;
}

std::string render_csv(const json& report) {
    std::ostringstream csv;
    csv << "model,metric,mean,std,runs,deterministic\n";
    for (const auto& m : report.at("models")) {
        const auto& agg = m.at("aggregate");
        for (const auto& [name, s] : agg.at("metrics").items()) {
            csv << m.at("model").get<std::string>() << ',' << name << ',' << s.at("mean").dump()
                << ',' << s.at("std").dump() << ',' << agg.at("runs").get<int>() << ','
                << (m.at("deterministic").get<bool>() ? "true" : "false") << '\n';
        }
    }
    return csv.str();
}

std::string render_markdown(const json& report) {
    std::ostringstream md;
    const auto& ds = report.at("dataset");
    const auto& models = report.at("models");
    md << "# Anomaly detection benchmark\n\n";
    md << "Dataset `" << ds.at("name").get<std::string>() << "`: " << ds.at("train").get<int>()
       << " normal training images; test split " << ds.at("test_normal").get<int>()
       << " normal / " << ds.at("test_anomalous").get<int>() << " anomalous. Runs: "
       << report.at("config").at("runs").get<int>() << " (base seed "
       << report.at("config").at("base_seed").get<std::uint64_t>() << "). Toolkit "
       << report.at("version").get<std::string>() << ".\n\n";
    md << "Values are percentages, mean ± sample std across runs; deterministic models "
          "show a single value. The best mean per column is bold.\n\n";

    bool any_image = false, any_pixel = false;
    for (const auto& m : models) {
        const auto& metrics = m.at("aggregate").at("metrics");
        any_image = any_image || metrics.contains("accuracy");
        any_pixel = any_pixel || metrics.contains("pixel_auroc");
    }
    if (any_image) {
        md << "## Image-level\n\n";
        append_table(md, models, std::begin(kImageColumns), std::end(kImageColumns));
    }
    if (any_pixel) {
        md << "## Image- and pixel-level\n\n";
        append_table(md, models, std::begin(kPixelColumns), std::end(kPixelColumns));
    }

    std::vector<std::string> notes;
    for (const auto& m : models) {
        for (const auto& run : m.at("runs")) {
            for (const auto& n : run.at("notes")) {
                const std::string line = display_name(m.at("model").get<std::string>()) + ": " +
                                         n.get<std::string>();
                if (std::find(notes.begin(), notes.end(), line) == notes.end()) notes.push_back(line);
            }
        }
    }
    if (!notes.empty()) {
        md << "## Notes\n\n";
        for (const auto& n : notes) md << "- " << n << '\n';
        md << '\n';
    }
    return md.str();
}

std::vector<fs::path> emit_report(const RunReport& report, const fs::path& outdir) {
    std::error_code ec;
    fs::create_directories(outdir, ec);
    if (ec) throw IoError("cannot create " + outdir.string() + ": " + ec.message());

    const json j = report_to_json(report);
    std::vector<fs::path> written{outdir / "report.json", outdir / "aggregates.csv",
                                  outdir / "report.md", outdir / "timings.json"};
    write_text(written[0], j.dump(2) + "\n");
    write_text(written[1], render_csv(j));
    write_text(written[2], render_markdown(j));

    json timings = json::array();
    for (const auto& t : report.timings) timings.push_back({{"stage", t.stage}, {"seconds", t.seconds}});
    write_text(written[3], timings.dump(2) + "\n");
    return written;
}

std::vector<fs::path> render_report_file(const fs::path& report_json, const fs::path& outdir) {
    std::ifstream in(report_json);
    if (!in) throw IoError("cannot read " + report_json.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError(report_json.string() + ": " + e.what());
    }
    std::error_code ec;
    fs::create_directories(outdir, ec);
    std::vector<fs::path> written{outdir / "aggregates.csv", outdir / "report.md"};
    write_text(written[0], render_csv(j));
    write_text(written[1], render_markdown(j));
    return written;
}

}  // namespace sarbench
