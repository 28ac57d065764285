#include "medplex/train.hpp"

#include "medplex/metrics.hpp"
#include "medplex/optimizer.hpp"

#include <cmath>
#include <limits>

namespace medplex {

TrainingData TrainingData::from(const MultiplexGraph& g, const LabelVector& labels) {
    if (labels.size() != g.num_nodes()) {
        throw DataError("training: " + std::to_string(labels.size()) + " labels for " + std::to_string(g.num_nodes()) +
                        " nodes");
    }
    labels.validate();
    TrainingData d;
    d.x = g.attributes.x;
    for (const auto& rel : g.relations) {
        d.operators.push_back(normalize_adjacency(rel));
        d.propagated.push_back(kernels::parallel::spmm(d.operators.back(), d.x));
    }
    d.labels = labels.labels;
    d.train_rows = labels.indices(Split::train);
    d.val_rows = labels.indices(Split::val);
    d.classes = labels.num_classes;
    return d;
}

ModelDims TrainingData::dims(std::size_t embed_dim) const {
    return {static_cast<std::size_t>(x.rows()), static_cast<std::size_t>(x.cols()), embed_dim, operators.size(),
            static_cast<std::size_t>(classes)};
}

namespace {

double accuracy_on(const std::vector<int>& pred, const std::vector<int>& labels, const std::vector<std::size_t>& rows,
                   int classes) {
    std::vector<int> p;
    std::vector<int> t;
    for (auto i : rows) {
        p.push_back(pred[i]);
        t.push_back(labels[i]);
    }
    return micro_f1(confusion_counts(p, t, classes));
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

} // namespace

ObjectiveResult evaluate_objective(const TrainingData& data, const Parameters& params,
                                   std::span<const std::size_t> perm, const LossWeights& weights, Parameters* grads) {
    const auto relations = data.operators.size();
    if (params.encoders.size() != relations) throw DataError("objective: parameter/relation count mismatch");
    ObjectiveResult res;
    auto& cache = res.cache;
    const Matrix x_tilde = permute_rows(data.x, perm);

    std::vector<InfomaxResult> infomax(relations);
    for (std::size_t r = 0; r < relations; ++r) {
        cache.clean.push_back(gcn_forward_propagated(data.propagated[r], params.encoders[r]));
        cache.corrupt.push_back(gcn_forward(data.operators[r], x_tilde, params.encoders[r]));
        cache.summaries.push_back(readout_summary(cache.clean[r].out));
        infomax[r] = infomax_loss(cache.clean[r].out, cache.corrupt[r].out, cache.summaries[r], params.discriminators[r]);
        res.components.infomax.push_back(infomax[r].loss);
    }

    std::vector<Matrix> hs;
    std::vector<Matrix> hs_tilde;
    for (std::size_t r = 0; r < relations; ++r) {
        hs.push_back(cache.clean[r].out);
        hs_tilde.push_back(cache.corrupt[r].out);
    }
    cache.pooled_clean = attentive_pool(hs, params.attention_logits);
    cache.pooled_corrupt = attentive_pool(hs_tilde, params.attention_logits);
    const auto consensus = consensus_loss(params.consensus, cache.pooled_clean.pooled, cache.pooled_corrupt.pooled);
    res.components.consensus = consensus.loss;

    cache.logits = params.consensus * params.classifier;
    cache.logits.rowwise() += params.classifier_bias.transpose();
    cache.y_hat = softmax_rows(cache.logits);
    const auto sup = supervised_loss(cache.y_hat, data.labels, data.train_rows);
    res.components.supervised = sup.loss;
    res.components.l2 = params.squared_norm();
    res.total = total_loss(res.components, weights);

    if (grads == nullptr) return res;

    // Backward, relations in fixed order.
    Parameters& g = *grads;
    g = Parameters::zeros({static_cast<std::size_t>(data.x.rows()), static_cast<std::size_t>(data.x.cols()),
                           static_cast<std::size_t>(params.consensus.cols()), relations,
                           static_cast<std::size_t>(params.classifier.cols())});

    const Matrix d_logits = softmax_rows_backward(cache.y_hat, weights.beta * sup.d_y_hat);
    g.classifier = params.consensus.transpose() * d_logits;
    g.classifier_bias = d_logits.colwise().sum().transpose();
    g.consensus = d_logits * params.classifier.transpose() + weights.alpha * consensus.d_o;

    const auto pool_clean = attentive_pool_backward(hs, cache.pooled_clean.weights, weights.alpha * consensus.d_clean);
    const auto pool_corrupt =
        attentive_pool_backward(hs_tilde, cache.pooled_corrupt.weights, weights.alpha * consensus.d_corrupt);
    g.attention_logits = pool_clean.d_logits + pool_corrupt.d_logits;

    for (std::size_t r = 0; r < relations; ++r) {
        const auto& im = infomax[r];
        Matrix d_h = im.d_h + pool_clean.dhs[r];
        d_h += readout_backward(cache.clean[r].out, cache.summaries[r], im.d_s);
        const Matrix d_h_tilde = im.d_h_tilde + pool_corrupt.dhs[r];
        g.discriminators[r] = im.d_m;
        g.encoders[r] = gcn_backward(cache.clean[r], params.encoders[r], d_h).dw +
                        gcn_backward(cache.corrupt[r], params.encoders[r], d_h_tilde).dw;
    }

    // L2 term.
    auto gb = param_blocks(g);
    const auto pb = param_blocks(params);
    for (std::size_t b = 0; b < gb.size(); ++b) {
        for (std::size_t i = 0; i < gb[b].values.size(); ++i) gb[b].values[i] += 2.0 * weights.gamma * pb[b].values[i];
    }
    return res;
}

std::uint64_t epoch_seed(std::uint64_t run_seed, int epoch) {
    // splitmix64 finalizer over (seed, epoch).
    std::uint64_t z = run_seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(epoch) + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

nlohmann::json TrainReport::to_json() const {
    std::vector<int> idx;
    std::vector<std::vector<double>> infomax;
    std::vector<double> consensus, supervised, l2, total, val;
    for (const auto& r : epochs) {
        idx.push_back(r.epoch);
        infomax.push_back(r.infomax);
        consensus.push_back(r.consensus);
        supervised.push_back(r.supervised);
        l2.push_back(r.l2);
        total.push_back(r.total);
        val.push_back(r.val_micro_f1);
    }
    return {{"epochs",
             {{"epoch", idx},
              {"infomax", infomax},
              {"consensus", consensus},
              {"supervised", supervised},
              {"l2", l2},
              {"total", total},
              {"val_micro_f1", val}}},
            {"weights", {{"alpha", weights.alpha}, {"beta", weights.beta}, {"gamma", weights.gamma}}},
            {"best_epoch", best_epoch},
            {"best_val_micro_f1", best_val_micro_f1},
            {"attention", attention}};
}

std::vector<int> predict(const Parameters& params) {
    return argmax_rows(classify(params.consensus, params.classifier, params.classifier_bias));
}


FitResult fit(const MultiplexGraph& g, const LabelVector& labels, const TrainingConfig& cfg) {
    cfg.validate();
    if (g.relations.empty()) throw DataError("fit: graph has no relations");
    const auto data = TrainingData::from(g, labels);
    if (data.train_rows.empty()) throw DataError("fit: no labeled training rows");

    FitResult result{ModelState::initialize(data.dims(cfg.embedding_dim), cfg.seed), {}};
    auto& state = result.state;
    auto& report = result.report;
    report.weights = cfg.loss_weights();
    Parameters best = state.params;
    Adam adam({cfg.learning_rate});
    const auto n = static_cast<std::size_t>(data.x.rows());

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto perm = corruption_permutation(n, epoch_seed(cfg.seed, epoch));
        const auto obj = evaluate_objective(data, state.params, perm, report.weights, &state.grads);
        if (!std::isfinite(obj.total)) throw NumericError("fit: non-finite loss at epoch " + std::to_string(epoch));

        EpochRecord rec;
        rec.epoch = epoch;
        rec.infomax = obj.components.infomax;
        rec.consensus = obj.components.consensus;
        rec.supervised = obj.components.supervised;
        rec.l2 = obj.components.l2;
        rec.total = obj.total;
        const auto pred = argmax_rows(obj.cache.y_hat);
        const auto& select_rows = data.val_rows.empty() ? data.train_rows : data.val_rows;
        rec.val_micro_f1 = accuracy_on(pred, data.labels, select_rows, data.classes);
        report.epochs.push_back(rec);

        if (report.best_epoch < 0 || rec.val_micro_f1 > report.best_val_micro_f1) {
            report.best_epoch = epoch;
            report.best_val_micro_f1 = rec.val_micro_f1;
            best = state.params;
        } else if (epoch - report.best_epoch >= cfg.patience) {
            break;
        }

        try {
            adam_step(adam, state);
        } catch (const NumericError& e) {
            throw NumericError(std::string(e.what()) + " at epoch " + std::to_string(epoch));
        }
        state.check_finite();
    }
    state.params = best;
    state.grads.set_zero();
    const Vector w = softmax(state.params.attention_logits);
    report.attention.assign(w.data(), w.data() + w.size());
    return result;
}

Matrix pooled_embeddings(const MultiplexGraph& g, const Parameters& params) {
    if (params.encoders.size() != g.relations.size()) throw DataError("pooled_embeddings: relation count mismatch");
    std::vector<Matrix> hs;
    for (std::size_t r = 0; r < g.relations.size(); ++r) {
        hs.push_back(gcn_forward(normalize_adjacency(g.relations[r]), g.attributes.x, params.encoders[r]).out);
    }
    return attentive_pool(hs, params.attention_logits).pooled;
}

std::vector<int> predict_inductive(const MultiplexGraph& extended, std::size_t original_nodes,
                                   const Parameters& params) {
    const auto n0 = original_nodes;
    if (extended.num_nodes() < n0) throw DataError("predict_inductive: extended graph is smaller than the original");
    if (static_cast<std::size_t>(params.consensus.rows()) != n0) {
        throw DataError("predict_inductive: model was trained on a different node count");
    }
    const auto m = extended.num_nodes() - n0;
    if (m == 0) return {};
    const Matrix q = pooled_embeddings(extended, params);
    const Matrix& x = extended.attributes.x;

    Matrix o_new(static_cast<Eigen::Index>(m), params.consensus.cols());
    for (std::size_t k = 0; k < m; ++k) {
        const auto row = static_cast<Eigen::Index>(n0 + k);
        Eigen::Index best = 0;
        double best_q = std::numeric_limits<double>::infinity();
        double best_x = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(n0); ++j) {
            const double dq = (q.row(row) - q.row(j)).squaredNorm();
            if (dq > best_q) continue;
            const double dx = (x.row(row) - x.row(j)).squaredNorm();
            if (dq < best_q || dx < best_x) {
                best = j;
                best_q = dq;
                best_x = dx;
            }
        }
        o_new.row(static_cast<Eigen::Index>(k)) = params.consensus.row(best);
    }
    return argmax_rows(classify(o_new, params.classifier, params.classifier_bias));
}

} // namespace medplex
