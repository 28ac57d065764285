#include "medplex/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace medplex {

SparseOperator normalize_adjacency(const RelationGraph& g) {
    const auto n = g.n;
    std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(n);
    std::vector<double> degree(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) rows[i].emplace_back(static_cast<std::uint32_t>(i), 1.0);
    for (const auto& e : g.edges) {
        rows[e.i].emplace_back(e.j, e.weight);
        rows[e.j].emplace_back(e.i, e.weight);
        degree[e.i] += e.weight;
        degree[e.j] += e.weight;
    }
    SparseOperator op;
    op.rows = n;
    op.cols = n;
    op.row_ptr.assign(1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        auto& r = rows[i];
        std::sort(r.begin(), r.end());
        for (const auto& [j, w] : r) {
            op.col.push_back(j);
            op.val.push_back(w / std::sqrt(degree[i] * degree[j]));
        }
        op.row_ptr.push_back(op.col.size());
    }
    return op;
}

GcnCache gcn_forward_propagated(const Matrix& propagated, const Matrix& w) {
    if (propagated.cols() != w.rows()) {
        throw DataError("gcn_forward: attribute width " + std::to_string(propagated.cols()) + " vs weight rows " +
                        std::to_string(w.rows()));
    }
    GcnCache c;
    c.propagated = propagated;
    c.pre = propagated * w;
    c.out = c.pre.cwiseMax(0.0);
    return c;
}

GcnCache gcn_forward(const SparseOperator& op, const Matrix& x, const Matrix& w) {
    if (op.cols != static_cast<std::size_t>(x.rows())) throw DataError("gcn_forward: operator/attribute row mismatch");
    return gcn_forward_propagated(kernels::parallel::spmm(op, x), w);
}

GcnGradients gcn_backward(const GcnCache& cache, const Matrix& w, const Matrix& d_out, const SparseOperator* op) {
    const Matrix d_pre = (cache.pre.array() > 0.0).select(d_out, 0.0);
    GcnGradients g;
    g.dw = cache.propagated.transpose() * d_pre;
    if (op != nullptr) {
        // op is symmetric, so op^T (d_pre W^T) = op (d_pre W^T).
        g.dx = kernels::parallel::spmm(*op, d_pre * w.transpose());
    }
    return g;
}

double logistic(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

Vector readout_summary(const Matrix& h) {
    if (h.rows() < 1) throw DataError("readout_summary: empty embedding matrix");
    Vector mean = h.colwise().mean().transpose();
    return mean.unaryExpr([](double v) { return logistic(v); });
}

Matrix readout_backward(const Matrix& h, const Vector& s, const Vector& ds) {
    const Vector d_mean = ds.cwiseProduct(s.cwiseProduct((Vector::Ones(s.size()) - s)));
    Matrix dh(h.rows(), h.cols());
    dh.rowwise() = (d_mean / static_cast<double>(h.rows())).transpose();
    return dh;
}

double discriminate(const Vector& h, const Vector& s, const Matrix& m) {
    return logistic(h.dot(m * s));
}

DiscriminatorGradients discriminate_backward(const Vector& h, const Vector& s, const Matrix& m, double d_score) {
    const double p = discriminate(h, s, m);
    const double du = d_score * p * (1.0 - p);
    DiscriminatorGradients g;
    g.dh = du * (m * s);
    g.ds = du * (m.transpose() * h);
    g.dm = du * h * s.transpose();
    return g;
}

std::vector<std::size_t> corruption_permutation(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);
    return perm;
}

Matrix permute_rows(const Matrix& x, std::span<const std::size_t> perm) {
    if (perm.size() != static_cast<std::size_t>(x.rows())) throw DataError("permute_rows: length mismatch");
    Matrix out(x.rows(), x.cols());
    for (std::size_t i = 0; i < perm.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(perm[i]));
    return out;
}

Matrix corrupt_features(const Matrix& x, std::uint64_t seed) {
    if (x.rows() < 1) throw DataError("corrupt_features: empty attribute matrix");
    return permute_rows(x, corruption_permutation(static_cast<std::size_t>(x.rows()), seed));
}

Vector softmax(const Vector& logits) {
    const double top = logits.maxCoeff();
    Vector e = (logits.array() - top).exp();
    return e / e.sum();
}

PoolResult attentive_pool(std::span<const Matrix> hs, const Vector& att_logits) {
    if (hs.empty() || static_cast<std::size_t>(att_logits.size()) != hs.size()) {
        throw DataError("attentive_pool: need one logit per relation");
    }
    PoolResult r;
    r.weights = softmax(att_logits);
    r.pooled = Matrix::Zero(hs[0].rows(), hs[0].cols());
    for (std::size_t k = 0; k < hs.size(); ++k) {
        if (hs[k].rows() != hs[0].rows() || hs[k].cols() != hs[0].cols()) throw DataError("attentive_pool: shape mismatch");
        r.pooled.noalias() += r.weights[static_cast<Eigen::Index>(k)] * hs[k];
    }
    return r;
}

PoolGradients attentive_pool_backward(std::span<const Matrix> hs, const Vector& weights, const Matrix& d_pooled) {
    PoolGradients g;
    const auto r = hs.size();
    Vector inner(static_cast<Eigen::Index>(r));
    for (std::size_t k = 0; k < r; ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        g.dhs.push_back(weights[kk] * d_pooled);
        inner[kk] = (hs[k].array() * d_pooled.array()).sum();
    }
    const double mean = weights.dot(inner);
    g.d_logits = weights.cwiseProduct((inner.array() - mean).matrix());
    return g;
}

Matrix softmax_rows(const Matrix& logits) {
    Matrix out(logits.rows(), logits.cols());
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        out.row(i) = softmax(logits.row(i).transpose()).transpose();
    }
    return out;
}

Matrix classify(const Matrix& o, const Matrix& w, const Vector& b) {
    if (o.cols() != w.rows() || w.cols() != b.size()) throw DataError("classify: shape mismatch");
    Matrix logits = o * w;
    logits.rowwise() += b.transpose();
    return softmax_rows(logits);
}

Matrix softmax_rows_backward(const Matrix& y_hat, const Matrix& d_y_hat) {
    Matrix d(y_hat.rows(), y_hat.cols());
    for (Eigen::Index i = 0; i < y_hat.rows(); ++i) {
        const double inner = y_hat.row(i).dot(d_y_hat.row(i));
        d.row(i) = y_hat.row(i).cwiseProduct((d_y_hat.row(i).array() - inner).matrix());
    }
    return d;
}

Parameters Parameters::zeros(const ModelDims& dims) {
    Parameters p;
    const auto f = static_cast<Eigen::Index>(dims.features);
    const auto d = static_cast<Eigen::Index>(dims.embed_dim);
    for (std::size_t r = 0; r < dims.relations; ++r) {
        p.encoders.push_back(Matrix::Zero(f, d));
        p.discriminators.push_back(Matrix::Zero(d, d));
    }
    p.consensus = Matrix::Zero(static_cast<Eigen::Index>(dims.nodes), d);
    p.attention_logits = Vector::Zero(static_cast<Eigen::Index>(dims.relations));
    p.classifier = Matrix::Zero(d, static_cast<Eigen::Index>(dims.classes));
    p.classifier_bias = Vector::Zero(static_cast<Eigen::Index>(dims.classes));
    return p;
}

void Parameters::set_zero() {
    for (auto& b : param_blocks(*this)) std::fill(b.values.begin(), b.values.end(), 0.0);
}

double Parameters::squared_norm() const {
    double s = 0.0;
    for (const auto& b : param_blocks(*this)) {
        for (double v : b.values) s += v * v;
    }
    return s;
}

namespace {

template <typename P, typename Block>
std::vector<Block> blocks_of(P& p) {
    std::vector<Block> out;
    for (std::size_t r = 0; r < p.encoders.size(); ++r) {
        out.push_back({"encoder[" + std::to_string(r) + "]", {p.encoders[r].data(), static_cast<std::size_t>(p.encoders[r].size())}});
    }
    for (std::size_t r = 0; r < p.discriminators.size(); ++r) {
        out.push_back({"discriminator[" + std::to_string(r) + "]",
                       {p.discriminators[r].data(), static_cast<std::size_t>(p.discriminators[r].size())}});
    }
    out.push_back({"consensus", {p.consensus.data(), static_cast<std::size_t>(p.consensus.size())}});
    out.push_back({"attention_logits", {p.attention_logits.data(), static_cast<std::size_t>(p.attention_logits.size())}});
    out.push_back({"classifier", {p.classifier.data(), static_cast<std::size_t>(p.classifier.size())}});
    out.push_back({"classifier_bias", {p.classifier_bias.data(), static_cast<std::size_t>(p.classifier_bias.size())}});
    return out;
}

void xavier_uniform(Matrix& m, std::mt19937_64& rng) {
    const double bound = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = u(rng);
}

} // namespace

std::vector<ParamBlock> param_blocks(Parameters& p) {
    return blocks_of<Parameters, ParamBlock>(p);
}

std::vector<ConstParamBlock> param_blocks(const Parameters& p) {
    return blocks_of<const Parameters, ConstParamBlock>(p);
}

ModelState ModelState::initialize(const ModelDims& dims, std::uint64_t seed) {
    if (dims.nodes < 1 || dims.features < 1 || dims.embed_dim < 1 || dims.relations < 1 || dims.classes < 1) {
        throw UsageError("model: every dimension must be >= 1");
    }
    ModelState s;
    s.dims = dims;
    s.seed = seed;
    s.params = Parameters::zeros(dims);
    s.grads = Parameters::zeros(dims);
    std::mt19937_64 rng(seed);
    for (auto& w : s.params.encoders) xavier_uniform(w, rng);
    for (auto& m : s.params.discriminators) xavier_uniform(m, rng);
    std::normal_distribution<double> small(0.0, 0.01);
    for (Eigen::Index k = 0; k < s.params.consensus.size(); ++k) s.params.consensus.data()[k] = small(rng);
    xavier_uniform(s.params.classifier, rng);
    return s;
}

void ModelState::check_finite() const {
    for (const auto& b : param_blocks(params)) {
        for (double v : b.values) {
            if (!std::isfinite(v)) throw NumericError("parameter block '" + b.name + "' is not finite");
        }
    }
}

} // namespace medplex
