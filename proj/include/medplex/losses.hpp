#ifndef MEDPLEX_LOSSES_HPP
#define MEDPLEX_LOSSES_HPP

#include "medplex/data.hpp"
#include "medplex/model.hpp"

#include <span>
#include <vector>

namespace medplex {

/// Probabilities entering a logarithm are clamped to [kProbFloor, 1 - kProbFloor].
inline constexpr double kProbFloor = 1e-7;

struct InfomaxResult {
    double loss = 0.0;
    Matrix d_h;
    Matrix d_h_tilde;
    Vector d_s;
    Matrix d_m;
};

/// Mean binary cross-entropy of the bilinear discriminator over n clean (positive)
/// and n corrupted (negative) patch-summary pairs.
InfomaxResult infomax_loss(const Matrix& h, const Matrix& h_tilde, const Vector& s, const Matrix& m);

struct ConsensusResult {
    double loss = 0.0;
    Matrix d_o;
    Matrix d_clean;
    Matrix d_corrupt;
    /// Only set by the attention-aware overload.
    Vector d_logits;
};

/// mean((O - clean)^2) - mean((O - corrupt)^2), over all n*d entries.
ConsensusResult consensus_loss(const Matrix& o, const Matrix& pooled_clean, const Matrix& pooled_corrupt);

/// Consensus loss with the pooling folded in; d_clean/d_corrupt are left empty and
/// gradients reach the relation embeddings through `pool_clean`/`pool_corrupt`.
struct PooledConsensusResult {
    ConsensusResult consensus;
    std::vector<Matrix> d_hs;
    std::vector<Matrix> d_hs_tilde;
};

PooledConsensusResult consensus_loss_pooled(const Matrix& o, std::span<const Matrix> hs,
                                            std::span<const Matrix> hs_tilde, const Vector& att_logits);

struct SupervisedResult {
    double loss = 0.0;
    Matrix d_y_hat;
};

/// Cross-entropy averaged over the rows of `rows` (the labeled training set).
SupervisedResult supervised_loss(const Matrix& y_hat, const std::vector<int>& labels,
                                 const std::vector<std::size_t>& rows);

struct LossComponents {
    std::vector<double> infomax; ///< one per relation
    double consensus = 0.0;
    double supervised = 0.0;
    double l2 = 0.0; ///< squared parameter norm, before weighting
};

struct LossWeights {
    double alpha = 0.001;
    double beta = 0.1;
    double gamma = 0.0001;
};

/// Sum of per-relation infomax losses + alpha * consensus + beta * supervised + gamma * l2.
double total_loss(const LossComponents& c, const LossWeights& w);
/// Same, with the l2 component recomputed from `params`.
double total_loss(LossComponents c, const LossWeights& w, const Parameters& params);

/// NT-Xent over 2N pooled views: row i of `view1` and row i of `view2` are the positive
/// pair; every other view is a negative. Averaged over all 2N anchors.
double micle_loss(const Matrix& view1, const Matrix& view2, double tau);

} // namespace medplex

#endif // MEDPLEX_LOSSES_HPP
