#ifndef MEDPLEX_PIPELINE_HPP
#define MEDPLEX_PIPELINE_HPP

#include "medplex/baselines.hpp"
#include "medplex/clustering.hpp"
#include "medplex/config.hpp"
#include "medplex/data.hpp"
#include "medplex/graph.hpp"
#include "medplex/metrics.hpp"
#include "medplex/train.hpp"

#include <optional>
#include <string>
#include <vector>

namespace medplex {

enum class ModelKind { multiplex, mlp, single_gcn };

const char* model_kind_name(ModelKind k);
ModelKind parse_model_kind(const std::string& name);

/// Raw cohort tables as read from disk.
struct Cohort {
    FeatureTable features;
    EmbeddingTable embeddings;
    std::vector<int> labels;
    int num_classes = 0;

    static Cohort from_synthetic(const SyntheticCohort& s);
};

/// Split masks for `cfg`: stratified split by cfg.seed, then the label-fraction cut.
LabelVector make_labels(const std::vector<int>& labels, int num_classes, const TrainingConfig& cfg);

/// K-means over the normalized columns with cfg.clusters types.
KMeansResult cluster_columns(const FeatureTable& normalized, const TrainingConfig& cfg);

/// Normalizes both tables, builds the node attributes and one relation graph per type
/// of `partition` (k-means when absent). Transforms are stored on the graph.
MultiplexGraph prepare_graph(const Cohort& cohort, const TrainingConfig& cfg,
                             const std::optional<ClusterPartition>& partition = std::nullopt);

/// Keeps the columns of the listed types. Types are renumbered in the listed order.
Cohort select_types(const Cohort& cohort, const ClusterPartition& partition, const std::vector<int>& types,
                    ClusterPartition* kept);

struct ExperimentResult {
    MetricsReport test;
    std::vector<int> predictions;
    LabelVector labels;
    ClusterPartition partition;
};

/// One seeded run: split, graph, fit `kind`, evaluate on the test mask.
ExperimentResult run_experiment(const Cohort& cohort, const TrainingConfig& cfg, ModelKind kind,
                                const std::optional<ClusterPartition>& partition = std::nullopt);

} // namespace medplex

#endif // MEDPLEX_PIPELINE_HPP
