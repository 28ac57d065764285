#ifndef MEDPLEX_BASELINES_HPP
#define MEDPLEX_BASELINES_HPP

#include "medplex/checkpoint.hpp"
#include "medplex/config.hpp"
#include "medplex/data.hpp"
#include "medplex/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace medplex {

enum class BaselineKind { mlp, single_gcn };

const char* baseline_kind_name(BaselineKind k);

/// H = ReLU(P W1 + b1), Y = softmax(H W2 + b2), where P is X for the MLP and op X for
/// the single-graph GCN.
struct BaselineParams {
    Matrix w1;
    Vector b1;
    Matrix w2;
    Vector b2;

    static BaselineParams zeros(std::size_t features, std::size_t hidden, std::size_t classes);
    std::vector<ParamBlock> blocks();
    std::vector<ConstParamBlock> blocks() const;
};

struct BaselineModel {
    BaselineKind kind = BaselineKind::mlp;
    BaselineParams params;
    BaselineParams grads;
    std::optional<SparseOperator> op; ///< set for the single-graph GCN
    double theta = 1.0;
    std::uint64_t seed = 0;

    /// Propagated inputs P for attribute matrix `x`.
    Matrix inputs(const Matrix& x) const;
    Matrix predict_proba(const Matrix& x) const;
    std::vector<int> predict(const Matrix& x) const;
};

struct BaselineObjective {
    double loss = 0.0;
    Matrix y_hat;
};

/// Cross-entropy on `rows` plus weight_decay * (|W1|^2 + |W2|^2). Writes gradients when
/// `grads` is non-null.
BaselineObjective baseline_objective(const Matrix& inputs, const BaselineParams& p, const std::vector<int>& labels,
                                     const std::vector<std::size_t>& rows, double weight_decay,
                                     BaselineParams* grads);

struct BaselineReport {
    std::string kind;
    std::vector<double> loss;
    std::vector<double> val_micro_f1;
    int best_epoch = -1;
    double best_val_micro_f1 = 0.0;

    nlohmann::json to_json() const;
};

struct BaselineFit {
    BaselineModel model;
    BaselineReport report;
};

BaselineFit fit_mlp(const NodeAttributes& x, const LabelVector& labels, const TrainingConfig& cfg);

/// Builds one cosine graph over every column of the normalized tabular block `c` at
/// threshold `theta`, then trains a one-layer GCN with a softmax head.
BaselineFit fit_single_gcn(const NodeAttributes& x, const FeatureTable& c, const LabelVector& labels, double theta,
                           const TrainingConfig& cfg);

Checkpoint checkpoint_from_baseline(const BaselineModel& m, const std::string& config_hash);
/// `op` must be supplied for a single-graph GCN checkpoint.
BaselineModel baseline_from_checkpoint(const Checkpoint& ck, std::optional<SparseOperator> op);

} // namespace medplex

#endif // MEDPLEX_BASELINES_HPP
