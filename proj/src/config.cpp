#include "medplex/config.hpp"

#include "medplex/hashing.hpp"

#include <algorithm>
#include <fstream>

namespace medplex {

namespace {

struct PresetRow {
    const char* name;
    double learning_rate;
    std::size_t embedding_dim;
    std::vector<double> thetas;
    double alpha;
    double beta;
    double gamma;
};

// Learning rate, embedding size, thresholds and loss weights per cohort.
const std::vector<PresetRow>& cohort_presets() {
    static const std::vector<PresetRow> rows{
        {"adni", 0.0005, 256, {0.9, 0.9, 0.9, 0.9}, 0.001, 0.1, 0.0001},
        {"oasis3", 0.0001, 128, {0.75, 0.75, 0.9, 0.9}, 0.001, 0.1, 0.0001},
        {"abide", 0.0005, 64, {0.9, 0.9, 0.9, 0.9}, 0.001, 1.0, 0.0001},
        {"duke", 0.0005, 64, {0.75, 0.9, 0.75, 0.75}, 0.001, 0.01, 0.0001},
        {"cmmd", 0.0001, 64, {0.9, 0.9, 0.9, 0.75}, 0.001, 0.01, 0.0001},
    };
    return rows;
}

} // namespace

void TrainingConfig::validate() const {
    if (!(learning_rate > 0.0)) throw UsageError("config: learning_rate must be > 0");
    if (embedding_dim < 1) throw UsageError("config: embedding_dim must be >= 1");
    if (clusters < 1) throw UsageError("config: clusters must be >= 1");
    if (thetas.size() != static_cast<std::size_t>(clusters)) {
        throw UsageError("config: need one threshold per cluster (" + std::to_string(clusters) + "), got " +
                         std::to_string(thetas.size()));
    }
    for (double t : thetas) {
        if (t < -1.0 || t > 1.0) throw UsageError("config: thresholds must lie in [-1, 1]");
    }
    if (alpha < 0.0 || beta < 0.0 || gamma < 0.0) throw UsageError("config: alpha, beta, gamma must be >= 0");
    if (!(tau > 0.0)) throw UsageError("config: tau must be > 0");
    if (epochs < 0 || patience < 1) throw UsageError("config: epochs must be >= 0 and patience >= 1");
    if (label_fraction < 0.0 || label_fraction > 1.0) throw UsageError("config: label_fraction must lie in [0, 1]");
    if (kmeans_restarts < 1 || kmeans_max_iters < 1) throw UsageError("config: kmeans restarts/iterations must be >= 1");
    if (!(baseline_learning_rate > 0.0) || baseline_epochs < 0 || baseline_weight_decay < 0.0) {
        throw UsageError("config: invalid baseline settings");
    }
}

double TrainingConfig::baseline_theta() const {
    if (single_gcn_theta >= -1.0) return single_gcn_theta;
    return *std::min_element(thetas.begin(), thetas.end());
}

nlohmann::json TrainingConfig::to_json() const {
    return {{"preset", preset},
            {"learning_rate", learning_rate},
            {"embedding_dim", embedding_dim},
            {"clusters", clusters},
            {"thetas", thetas},
            {"alpha", alpha},
            {"beta", beta},
            {"gamma", gamma},
            {"tau", tau},
            {"epochs", epochs},
            {"patience", patience},
            {"seed", seed},
            {"split", {split.train, split.val, split.test}},
            {"label_fraction", label_fraction},
            {"kmeans_restarts", kmeans_restarts},
            {"kmeans_max_iters", kmeans_max_iters},
            {"hidden_dim", hidden_dim},
            {"baseline_learning_rate", baseline_learning_rate},
            {"baseline_epochs", baseline_epochs},
            {"baseline_weight_decay", baseline_weight_decay},
            {"single_gcn_theta", single_gcn_theta}};
}

TrainingConfig TrainingConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw UsageError("config: expected a JSON object");
    TrainingConfig c = j.contains("preset") ? preset_named(j.at("preset").get<std::string>()) : TrainingConfig{};
    try {
        c.learning_rate = j.value("learning_rate", c.learning_rate);
        c.embedding_dim = j.value("embedding_dim", c.embedding_dim);
        c.clusters = j.value("clusters", c.clusters);
        c.thetas = j.value("thetas", c.thetas);
        c.alpha = j.value("alpha", c.alpha);
        c.beta = j.value("beta", c.beta);
        c.gamma = j.value("gamma", c.gamma);
        c.tau = j.value("tau", c.tau);
        c.epochs = j.value("epochs", c.epochs);
        c.patience = j.value("patience", c.patience);
        c.seed = j.value("seed", c.seed);
        if (j.contains("split")) {
            const auto s = j.at("split").get<std::vector<double>>();
            if (s.size() != 3) throw UsageError("config: split must list train, val, test fractions");
            c.split = {s[0], s[1], s[2]};
        }
        c.label_fraction = j.value("label_fraction", c.label_fraction);
        c.kmeans_restarts = j.value("kmeans_restarts", c.kmeans_restarts);
        c.kmeans_max_iters = j.value("kmeans_max_iters", c.kmeans_max_iters);
        c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
        c.baseline_learning_rate = j.value("baseline_learning_rate", c.baseline_learning_rate);
        c.baseline_epochs = j.value("baseline_epochs", c.baseline_epochs);
        c.baseline_weight_decay = j.value("baseline_weight_decay", c.baseline_weight_decay);
        c.single_gcn_theta = j.value("single_gcn_theta", c.single_gcn_theta);
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("config: ") + e.what());
    }
    // A cluster count override without thresholds repeats the smallest preset threshold.
    if (j.contains("clusters") && !j.contains("thetas") && c.thetas.size() != static_cast<std::size_t>(c.clusters)) {
        const double t = *std::min_element(c.thetas.begin(), c.thetas.end());
        c.thetas.assign(static_cast<std::size_t>(c.clusters), t);
    }
    c.validate();
    return c;
}

TrainingConfig TrainingConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(path.string() + ": " + e.what());
    }
    return from_json(j);
}

TrainingConfig TrainingConfig::preset_named(const std::string& name) {
    TrainingConfig c;
    c.preset = name;
    if (name == "custom") return c;
    if (name == "synth") {
        // Tuned on the two-signal synthetic cohort: 380 z-scored columns give dense
        // graphs at low thresholds, and the all-column baseline graph needs a lower one.
        c.learning_rate = 0.017;
        c.embedding_dim = 64;
        c.clusters = 4;
        c.thetas = {0.1, 0.1, 0.1, 0.1};
        c.alpha = 9.0;
        c.beta = 0.02;
        c.gamma = 0.0005;
        c.epochs = 400;
        c.patience = 50;
        c.single_gcn_theta = 0.05;
        return c;
    }
    for (const auto& row : cohort_presets()) {
        if (name == row.name) {
            c.learning_rate = row.learning_rate;
            c.embedding_dim = row.embedding_dim;
            c.clusters = static_cast<int>(row.thetas.size());
            c.thetas = row.thetas;
            c.alpha = row.alpha;
            c.beta = row.beta;
            c.gamma = row.gamma;
            return c;
        }
    }
    throw UsageError("unknown preset '" + name + "'");
}

std::vector<std::string> TrainingConfig::preset_names() {
    std::vector<std::string> names;
    for (const auto& row : cohort_presets()) names.emplace_back(row.name);
    names.emplace_back("synth");
    return names;
}

std::string TrainingConfig::hash() const {
    return sha256_hex(to_json().dump()).substr(0, 16);
}

} // namespace medplex
