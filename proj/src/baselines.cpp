#include "medplex/baselines.hpp"

#include "medplex/graph.hpp"
#include "medplex/losses.hpp"
#include "medplex/metrics.hpp"
#include "medplex/optimizer.hpp"

#include <cmath>
#include <random>

namespace medplex {

const char* baseline_kind_name(BaselineKind k) {
    return k == BaselineKind::mlp ? "mlp" : "single_gcn";
}

BaselineParams BaselineParams::zeros(std::size_t features, std::size_t hidden, std::size_t classes) {
    const auto f = static_cast<Eigen::Index>(features);
    const auto h = static_cast<Eigen::Index>(hidden);
    const auto c = static_cast<Eigen::Index>(classes);
    return {Matrix::Zero(f, h), Vector::Zero(h), Matrix::Zero(h, c), Vector::Zero(c)};
}

namespace {

template <typename P, typename Block>
std::vector<Block> blocks_of(P& p) {
    return {{"w1", {p.w1.data(), static_cast<std::size_t>(p.w1.size())}},
            {"b1", {p.b1.data(), static_cast<std::size_t>(p.b1.size())}},
            {"w2", {p.w2.data(), static_cast<std::size_t>(p.w2.size())}},
            {"b2", {p.b2.data(), static_cast<std::size_t>(p.b2.size())}}};
}

void xavier(Matrix& m, std::mt19937_64& rng) {
    const double a = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
    std::uniform_real_distribution<double> u(-a, a);
    for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = u(rng);
}

std::vector<int> argmax_rows(const Matrix& y) {
    std::vector<int> out(static_cast<std::size_t>(y.rows()));
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
        Eigen::Index k = 0;
        y.row(i).maxCoeff(&k);
        out[static_cast<std::size_t>(i)] = static_cast<int>(k);
    }
    return out;
}

Matrix forward_hidden(const Matrix& inputs, const BaselineParams& p, Matrix* pre_out) {
    Matrix pre = inputs * p.w1;
    pre.rowwise() += p.b1.transpose();
    Matrix h = pre.cwiseMax(0.0);
    if (pre_out != nullptr) *pre_out = std::move(pre);
    return h;
}

BaselineFit train(BaselineModel model, const Matrix& x, const LabelVector& labels, const TrainingConfig& cfg) {
    cfg.validate();
    labels.validate();
    if (static_cast<std::size_t>(x.rows()) != labels.size()) throw DataError("baseline: attribute/label length mismatch");
    const auto train_rows = labels.indices(Split::train);
    if (train_rows.empty()) throw DataError("baseline: no labeled training rows");
    auto val_rows = labels.indices(Split::val);
    if (val_rows.empty()) val_rows = train_rows;

    const Matrix inputs = model.inputs(x);
    model.params = BaselineParams::zeros(static_cast<std::size_t>(x.cols()), cfg.baseline_hidden(),
                                         static_cast<std::size_t>(labels.num_classes));
    model.grads = model.params;
    std::mt19937_64 rng(model.seed);
    xavier(model.params.w1, rng);
    xavier(model.params.w2, rng);

    BaselineFit fit{model, {}};
    fit.report.kind = baseline_kind_name(model.kind);
    BaselineParams best = fit.model.params;
    Adam adam({cfg.baseline_learning_rate});
    for (int epoch = 0; epoch < cfg.baseline_epochs; ++epoch) {
        const auto obj = baseline_objective(inputs, fit.model.params, labels.labels, train_rows,
                                            cfg.baseline_weight_decay, &fit.model.grads);
        if (!std::isfinite(obj.loss)) {
            throw NumericError(fit.report.kind + ": non-finite loss at epoch " + std::to_string(epoch));
        }
        const auto pred = argmax_rows(obj.y_hat);
        std::vector<int> p;
        std::vector<int> t;
        for (auto i : val_rows) {
            p.push_back(pred[i]);
            t.push_back(labels.labels[i]);
        }
        const double val = micro_f1(confusion_counts(p, t, labels.num_classes));
        fit.report.loss.push_back(obj.loss);
        fit.report.val_micro_f1.push_back(val);
        if (fit.report.best_epoch < 0 || val > fit.report.best_val_micro_f1) {
            fit.report.best_epoch = epoch;
            fit.report.best_val_micro_f1 = val;
            best = fit.model.params;
        } else if (epoch - fit.report.best_epoch >= cfg.patience) {
            break;
        }
        const auto pb = fit.model.params.blocks();
        const auto gb = std::as_const(fit.model.grads).blocks();
        try {
            adam.step(pb, gb);
        } catch (const NumericError& e) {
            throw NumericError(std::string(e.what()) + " at epoch " + std::to_string(epoch));
        }
    }
    fit.model.params = best;
    return fit;
}

} // namespace

std::vector<ParamBlock> BaselineParams::blocks() {
    return blocks_of<BaselineParams, ParamBlock>(*this);
}

std::vector<ConstParamBlock> BaselineParams::blocks() const {
    return blocks_of<const BaselineParams, ConstParamBlock>(*this);
}

Matrix BaselineModel::inputs(const Matrix& x) const {
    if (kind == BaselineKind::mlp) return x;
    if (!op) throw DataError("single_gcn: missing graph operator");
    if (op->rows != static_cast<std::size_t>(x.rows())) throw DataError("single_gcn: operator/attribute size mismatch");
    return kernels::parallel::spmm(*op, x);
}

Matrix BaselineModel::predict_proba(const Matrix& x) const {
    const Matrix h = forward_hidden(inputs(x), params, nullptr);
    Matrix logits = h * params.w2;
    logits.rowwise() += params.b2.transpose();
    return softmax_rows(logits);
}

std::vector<int> BaselineModel::predict(const Matrix& x) const {
    return argmax_rows(predict_proba(x));
}

BaselineObjective baseline_objective(const Matrix& inputs, const BaselineParams& p, const std::vector<int>& labels,
                                     const std::vector<std::size_t>& rows, double weight_decay,
                                     BaselineParams* grads) {
    Matrix pre;
    const Matrix h = forward_hidden(inputs, p, &pre);
    Matrix logits = h * p.w2;
    logits.rowwise() += p.b2.transpose();
    BaselineObjective out;
    out.y_hat = softmax_rows(logits);
    const auto sup = supervised_loss(out.y_hat, labels, rows);
    out.loss = sup.loss + weight_decay * (p.w1.squaredNorm() + p.w2.squaredNorm());
    if (grads == nullptr) return out;

    const Matrix d_logits = softmax_rows_backward(out.y_hat, sup.d_y_hat);
    grads->w2 = h.transpose() * d_logits + 2.0 * weight_decay * p.w2;
    grads->b2 = d_logits.colwise().sum().transpose();
    const Matrix d_pre = ((d_logits * p.w2.transpose()).array() * (pre.array() > 0.0).cast<double>()).matrix();
    grads->w1 = inputs.transpose() * d_pre + 2.0 * weight_decay * p.w1;
    grads->b1 = d_pre.colwise().sum().transpose();
    return out;
}

nlohmann::json BaselineReport::to_json() const {
    return {{"kind", kind},
            {"epochs", {{"loss", loss}, {"val_micro_f1", val_micro_f1}}},
            {"best_epoch", best_epoch},
            {"best_val_micro_f1", best_val_micro_f1}};
}

BaselineFit fit_mlp(const NodeAttributes& x, const LabelVector& labels, const TrainingConfig& cfg) {
    BaselineModel m;
    m.kind = BaselineKind::mlp;
    m.seed = cfg.seed;
    return train(std::move(m), x.x, labels, cfg);
}

BaselineFit fit_single_gcn(const NodeAttributes& x, const FeatureTable& c, const LabelVector& labels, double theta,
                           const TrainingConfig& cfg) {
    if (c.rows() != static_cast<std::size_t>(x.x.rows())) throw DataError("single_gcn: feature/attribute row mismatch");
    BaselineModel m;
    m.kind = BaselineKind::single_gcn;
    m.seed = cfg.seed;
    m.theta = theta;
    m.op = normalize_adjacency(build_relation_graph(c.values, theta));
    return train(std::move(m), x.x, labels, cfg);
}

Checkpoint checkpoint_from_baseline(const BaselineModel& m, const std::string& config_hash) {
    const nlohmann::json dims{{"features", m.params.w1.rows()},
                              {"hidden", m.params.w1.cols()},
                              {"classes", m.params.w2.cols()},
                              {"theta", m.theta}};
    const auto blocks = m.params.blocks();
    return make_checkpoint(baseline_kind_name(m.kind), dims, m.seed, config_hash, blocks);
}

BaselineModel baseline_from_checkpoint(const Checkpoint& ck, std::optional<SparseOperator> op) {
    BaselineModel m;
    if (ck.kind == "mlp") {
        m.kind = BaselineKind::mlp;
    } else if (ck.kind == "single_gcn") {
        m.kind = BaselineKind::single_gcn;
        if (!op) throw DataError("single_gcn checkpoint needs its graph");
        m.op = std::move(op);
    } else {
        throw DataError("checkpoint holds a '" + ck.kind + "' model, not a baseline");
    }
    try {
        m.theta = ck.dims.at("theta").get<double>();
        m.params = BaselineParams::zeros(ck.dims.at("features").get<std::size_t>(), ck.dims.at("hidden").get<std::size_t>(),
                                         ck.dims.at("classes").get<std::size_t>());
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("baseline checkpoint dims: ") + e.what());
    }
    m.grads = m.params;
    m.seed = ck.seed;
    ck.restore(m.params.blocks());
    return m;
}

} // namespace medplex
