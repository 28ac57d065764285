#ifndef MEDPLEX_CONFIG_HPP
#define MEDPLEX_CONFIG_HPP

#include "medplex/data.hpp"
#include "medplex/losses.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace medplex {

/// Hyperparameters for clustering, graph construction, training and baselines.
struct TrainingConfig {
    double learning_rate = 0.0005;
    std::size_t embedding_dim = 64;
    int clusters = 4;
    std::vector<double> thetas{0.9, 0.9, 0.9, 0.9};
    double alpha = 0.001;
    double beta = 0.1;
    double gamma = 0.0001;
    double tau = 0.1;
    int epochs = 1000;
    int patience = 50;
    std::uint64_t seed = 0;

    SplitFractions split;
    /// Fraction of each class kept as training labels; 0 keeps the whole training split.
    double label_fraction = 0.0;

    int kmeans_restarts = 20;
    int kmeans_max_iters = 300;

    /// Baselines. hidden_dim 0 means embedding_dim; single_gcn_theta < -1 means min(thetas).
    std::size_t hidden_dim = 0;
    double baseline_learning_rate = 0.01;
    int baseline_epochs = 500;
    double baseline_weight_decay = 0.0005;
    double single_gcn_theta = -2.0;

    std::string preset = "custom";

    void validate() const;
    LossWeights loss_weights() const { return {alpha, beta, gamma}; }
    std::size_t baseline_hidden() const { return hidden_dim == 0 ? embedding_dim : hidden_dim; }
    double baseline_theta() const;

    nlohmann::json to_json() const;
    /// Missing keys fall back to the named preset ("preset" key) or to the defaults.
    static TrainingConfig from_json(const nlohmann::json& j);
    static TrainingConfig load(const std::filesystem::path& path);
    /// adni, oasis3, abide, duke, cmmd, synth.
    static TrainingConfig preset_named(const std::string& name);
    static std::vector<std::string> preset_names();

    /// First 16 hex digits of the SHA-256 of the canonical JSON form.
    std::string hash() const;
};

} // namespace medplex

#endif // MEDPLEX_CONFIG_HPP
