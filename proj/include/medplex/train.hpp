#ifndef MEDPLEX_TRAIN_HPP
#define MEDPLEX_TRAIN_HPP

#include "medplex/config.hpp"
#include "medplex/graph.hpp"
#include "medplex/losses.hpp"
#include "medplex/model.hpp"

#include <span>
#include <vector>

namespace medplex {

/// Everything the objective needs that does not change during training.
struct TrainingData {
    Matrix x;
    std::vector<SparseOperator> operators;
    std::vector<Matrix> propagated; ///< op_r X per relation
    std::vector<int> labels;
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> val_rows;
    int classes = 0;

    static TrainingData from(const MultiplexGraph& g, const LabelVector& labels);
    ModelDims dims(std::size_t embed_dim) const;
};

struct ObjectiveResult {
    LossComponents components;
    double total = 0.0;
    ForwardCache cache;
};

/// Forward pass of every loss term under corruption permutation `perm`. When `grads`
/// is non-null it is overwritten with d(total)/d(params).
ObjectiveResult evaluate_objective(const TrainingData& data, const Parameters& params,
                                   std::span<const std::size_t> perm, const LossWeights& weights,
                                   Parameters* grads);

/// Corruption seed for a given epoch of a run.
std::uint64_t epoch_seed(std::uint64_t run_seed, int epoch);

struct EpochRecord {
    int epoch = 0;
    std::vector<double> infomax;
    double consensus = 0.0;
    double supervised = 0.0;
    double l2 = 0.0;
    double total = 0.0;
    double val_micro_f1 = 0.0;
};

struct TrainReport {
    std::vector<EpochRecord> epochs;
    int best_epoch = -1;
    double best_val_micro_f1 = 0.0;
    std::vector<double> attention;
    LossWeights weights;

    nlohmann::json to_json() const;
};

struct FitResult {
    ModelState state;
    TrainReport report;
};

/// Full-batch training with Adam. Returns the parameters of the epoch with the best
/// validation Micro-F1 (earliest on ties) and stops after `patience` epochs without
/// improvement.
FitResult fit(const MultiplexGraph& g, const LabelVector& labels, const TrainingConfig& cfg);

/// Class predictions from the consensus embedding.
std::vector<int> predict(const Parameters& params);

/// Attention-pooled clean embeddings on graph `g`.
Matrix pooled_embeddings(const MultiplexGraph& g, const Parameters& params);

/// Predictions for the nodes `original_nodes..` of `extended`, a trained graph with
/// nodes attached afterwards. A new node has no trained consensus row, so it borrows
/// the row of the original node nearest in pooled embedding space on the extended
/// graph (attribute distance breaks ties).
std::vector<int> predict_inductive(const MultiplexGraph& extended, std::size_t original_nodes,
                                   const Parameters& params);

} // namespace medplex

#endif // MEDPLEX_TRAIN_HPP
