#ifndef MEDPLEX_MODEL_HPP
#define MEDPLEX_MODEL_HPP

#include "medplex/graph.hpp"
#include "medplex/kernels.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace medplex {

/// D^-1/2 (A + I) D^-1/2 as a symmetric CSR operator.
using SparseOperator = CsrMatrix;

SparseOperator normalize_adjacency(const RelationGraph& g);

// ---------------------------------------------------------------------------
// Single-layer GCN encoder: H = ReLU(op X W).

struct GcnCache {
    Matrix propagated; ///< op X
    Matrix pre;        ///< op X W
    Matrix out;        ///< ReLU(pre)
};

GcnCache gcn_forward(const SparseOperator& op, const Matrix& x, const Matrix& w);
/// Same as gcn_forward when `propagated` already holds op X.
GcnCache gcn_forward_propagated(const Matrix& propagated, const Matrix& w);

struct GcnGradients {
    Matrix dw;
    Matrix dx;
};

/// Gradients of a scalar loss given dL/dH. dx is only formed when `op` is non-null.
GcnGradients gcn_backward(const GcnCache& cache, const Matrix& w, const Matrix& d_out,
                          const SparseOperator* op = nullptr);

// ---------------------------------------------------------------------------
// Readout and discriminator.

double logistic(double x);

/// s = logistic(mean of the rows of h).
Vector readout_summary(const Matrix& h);
/// dL/dH given dL/ds, for s = readout_summary(h).
Matrix readout_backward(const Matrix& h, const Vector& s, const Vector& ds);

/// logistic(h^T M s).
double discriminate(const Vector& h, const Vector& s, const Matrix& m);

struct DiscriminatorGradients {
    Vector dh;
    Vector ds;
    Matrix dm;
};

/// Gradients of a scalar loss given dL/dscore.
DiscriminatorGradients discriminate_backward(const Vector& h, const Vector& s, const Matrix& m, double d_score);

// ---------------------------------------------------------------------------
// Corruption: one row permutation shared by every relation within a step.

std::vector<std::size_t> corruption_permutation(std::size_t n, std::uint64_t seed);
Matrix permute_rows(const Matrix& x, std::span<const std::size_t> perm);
Matrix corrupt_features(const Matrix& x, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Relation-level attentive pooling.

Vector softmax(const Vector& logits);

struct PoolResult {
    Matrix pooled;
    Vector weights;
};

PoolResult attentive_pool(std::span<const Matrix> hs, const Vector& att_logits);

struct PoolGradients {
    std::vector<Matrix> dhs;
    Vector d_logits;
};

PoolGradients attentive_pool_backward(std::span<const Matrix> hs, const Vector& weights, const Matrix& d_pooled);

// ---------------------------------------------------------------------------
// Softmax classifier head.

/// Row-wise softmax(o W + b).
Matrix classify(const Matrix& o, const Matrix& w, const Vector& b);

/// dL/dlogits given Y_hat = row softmax(logits) and dL/dY_hat.
Matrix softmax_rows_backward(const Matrix& y_hat, const Matrix& d_y_hat);

Matrix softmax_rows(const Matrix& logits);

// ---------------------------------------------------------------------------
// Trainable state.

struct ModelDims {
    std::size_t nodes = 0;
    std::size_t features = 0;
    std::size_t embed_dim = 0;
    std::size_t relations = 0;
    std::size_t classes = 0;

    friend bool operator==(const ModelDims&, const ModelDims&) = default;
};

/// All trainable parameters. The same struct doubles as the gradient buffer.
struct Parameters {
    std::vector<Matrix> encoders;       ///< F x d per relation
    std::vector<Matrix> discriminators; ///< d x d per relation
    Matrix consensus;                   ///< n x d
    Vector attention_logits;            ///< one per relation
    Matrix classifier;                  ///< d x c
    Vector classifier_bias;             ///< c

    static Parameters zeros(const ModelDims& dims);
    void set_zero();
    /// Sum of squares of every entry.
    double squared_norm() const;
};

struct ParamBlock {
    std::string name;
    std::span<double> values;
};

struct ConstParamBlock {
    std::string name;
    std::span<const double> values;
};

/// Blocks in checkpoint order: W^(1..R), M^(1..R), O, attention logits, W_cls, bias.
std::vector<ParamBlock> param_blocks(Parameters& p);
std::vector<ConstParamBlock> param_blocks(const Parameters& p);

struct ModelState {
    ModelDims dims;
    std::uint64_t seed = 0;
    Parameters params;
    Parameters grads;

    /// Xavier-uniform weights, O ~ N(0, 0.01^2), zero attention logits and bias.
    static ModelState initialize(const ModelDims& dims, std::uint64_t seed);
    /// Throws NumericError naming the first non-finite parameter block.
    void check_finite() const;
};

/// Per-relation activations of one forward pass, kept for backward and reporting.
struct ForwardCache {
    std::vector<GcnCache> clean;
    std::vector<GcnCache> corrupt;
    std::vector<Vector> summaries;
    PoolResult pooled_clean;
    PoolResult pooled_corrupt;
    Matrix logits;
    Matrix y_hat;
};

} // namespace medplex

#endif // MEDPLEX_MODEL_HPP
