#ifndef MEDPLEX_TEST_GRADIENT_SUITE_HPP
#define MEDPLEX_TEST_GRADIENT_SUITE_HPP

#include "medplex/graph.hpp"
#include "medplex/losses.hpp"
#include "medplex/model.hpp"
#include "medplex/train.hpp"

#include "test_support.hpp"

#include <string>
#include <vector>

// Central-difference checks of every differentiable operation and of the full objective
// on one random instance (n=12, F=8, d=4, two relations, three classes).
namespace gradient_suite {

using namespace medplex;

struct Check {
    std::string name;
    double error = 0.0;
};

class Suite {
public:
    template <typename M, typename G, typename F>
    void add(const std::string& name, M& x, const G& analytic, F&& f) {
        checks.push_back({name, testing::max_fd_error(x.data(), static_cast<std::size_t>(x.size()), analytic.data(),
                                                      std::forward<F>(f))});
    }
    std::vector<Check> checks;
};

inline double weighted_sum(const Matrix& a, const Matrix& g) {
    return (a.array() * g.array()).sum();
}

inline std::vector<Check> run(std::uint64_t seed) {
    constexpr Eigen::Index n = 12;
    constexpr Eigen::Index f = 8;
    constexpr Eigen::Index d = 4;
    constexpr Eigen::Index c = 3;
    std::mt19937_64 rng(seed);
    Suite s;

    // GCN layer through a real normalized operator.
    const auto op = normalize_adjacency(build_relation_graph(testing::random_matrix(n, 3, rng), 0.2));
    Matrix x = testing::random_matrix(n, f, rng);
    Matrix w = testing::random_matrix(f, d, rng);
    const Matrix g_out = testing::random_matrix(n, d, rng);
    {
        const auto cache = gcn_forward(op, x, w);
        const auto grads = gcn_backward(cache, w, g_out, &op);
        auto loss = [&] { return weighted_sum(gcn_forward(op, x, w).out, g_out); };
        s.add("gcn dW", w, grads.dw, loss);
        s.add("gcn dX", x, grads.dx, loss);
    }

    // Readout summary.
    Matrix h = testing::random_matrix(n, d, rng);
    const Vector g_s = testing::random_matrix(d, 1, rng);
    {
        const Vector sum = readout_summary(h);
        const Matrix dh = readout_backward(h, sum, g_s);
        s.add("readout dH", h, dh, [&] { return readout_summary(h).dot(g_s); });
    }

    // Bilinear discriminator score.
    Vector hv = testing::random_matrix(d, 1, rng);
    Vector sv = testing::random_matrix(d, 1, rng);
    Matrix m = testing::random_matrix(d, d, rng);
    {
        const auto grads = discriminate_backward(hv, sv, m, 1.0);
        auto score = [&] { return discriminate(hv, sv, m); };
        s.add("discriminator dh", hv, grads.dh, score);
        s.add("discriminator ds", sv, grads.ds, score);
        s.add("discriminator dM", m, grads.dm, score);
    }

    // Attentive pooling.
    std::vector<Matrix> hs{testing::random_matrix(n, d, rng), testing::random_matrix(n, d, rng)};
    std::vector<Matrix> hts{testing::random_matrix(n, d, rng), testing::random_matrix(n, d, rng)};
    Vector logits = testing::random_matrix(2, 1, rng);
    {
        const auto pooled = attentive_pool(hs, logits);
        const auto grads = attentive_pool_backward(hs, pooled.weights, g_out);
        auto loss = [&] { return weighted_sum(attentive_pool(hs, logits).pooled, g_out); };
        s.add("pool dH0", hs[0], grads.dhs[0], loss);
        s.add("pool dH1", hs[1], grads.dhs[1], loss);
        s.add("pool dlogits", logits, grads.d_logits, loss);
    }

    // Softmax head: classify then an arbitrary linear functional of the probabilities.
    Matrix o = testing::random_matrix(n, d, rng);
    Matrix wc = testing::random_matrix(d, c, rng);
    Vector bc = testing::random_matrix(c, 1, rng);
    const Matrix g_y = testing::random_matrix(n, c, rng);
    {
        const Matrix y = classify(o, wc, bc);
        const Matrix dz = softmax_rows_backward(y, g_y);
        const Matrix dw = o.transpose() * dz;
        const Vector db = dz.colwise().sum().transpose();
        const Matrix d_o = dz * wc.transpose();
        auto loss = [&] { return weighted_sum(classify(o, wc, bc), g_y); };
        s.add("classifier dW", wc, dw, loss);
        s.add("classifier db", bc, db, loss);
        s.add("classifier dO", o, d_o, loss);
    }

    // Infomax.
    Matrix ht = testing::random_matrix(n, d, rng);
    Vector summary = readout_summary(testing::random_matrix(n, d, rng));
    {
        const auto r = infomax_loss(h, ht, summary, m);
        auto loss = [&] { return infomax_loss(h, ht, summary, m).loss; };
        s.add("infomax dH", h, r.d_h, loss);
        s.add("infomax dH~", ht, r.d_h_tilde, loss);
        s.add("infomax ds", summary, r.d_s, loss);
        s.add("infomax dM", m, r.d_m, loss);
    }

    // Consensus, on pooled inputs and with the pooling folded in.
    Matrix clean = testing::random_matrix(n, d, rng);
    Matrix corrupt = testing::random_matrix(n, d, rng);
    {
        const auto r = consensus_loss(o, clean, corrupt);
        auto loss = [&] { return consensus_loss(o, clean, corrupt).loss; };
        s.add("consensus dO", o, r.d_o, loss);
        s.add("consensus dclean", clean, r.d_clean, loss);
        s.add("consensus dcorrupt", corrupt, r.d_corrupt, loss);
    }
    {
        const auto r = consensus_loss_pooled(o, hs, hts, logits);
        auto loss = [&] { return consensus_loss_pooled(o, hs, hts, logits).consensus.loss; };
        s.add("pooled consensus dO", o, r.consensus.d_o, loss);
        s.add("pooled consensus dH0", hs[0], r.d_hs[0], loss);
        s.add("pooled consensus dH~1", hts[1], r.d_hs_tilde[1], loss);
        s.add("pooled consensus dlogits", logits, r.consensus.d_logits, loss);
    }

    // Supervised cross-entropy on probabilities away from the clamp.
    Matrix y_hat = softmax_rows(testing::random_matrix(n, c, rng));
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = static_cast<int>(i % c);
    const std::vector<std::size_t> rows{0, 1, 2, 3, 4, 5, 7};
    {
        const auto r = supervised_loss(y_hat, labels, rows);
        s.add("supervised dY", y_hat, r.d_y_hat, [&] { return supervised_loss(y_hat, labels, rows).loss; });
    }

    // Full objective over every parameter block.
    TrainingData data;
    data.x = testing::random_matrix(n, f, rng);
    for (int r = 0; r < 2; ++r) {
        data.operators.push_back(normalize_adjacency(build_relation_graph(testing::random_matrix(n, 3, rng), 0.3)));
        data.propagated.push_back(data.operators.back().to_dense() * data.x);
    }
    data.labels = labels;
    data.train_rows = rows;
    data.val_rows = {6, 8};
    data.classes = static_cast<int>(c);
    auto state = ModelState::initialize(data.dims(static_cast<std::size_t>(d)), seed);
    state.params.attention_logits << 0.3, -0.2;
    const LossWeights weights{0.7, 0.9, 0.05};
    const auto perm = corruption_permutation(static_cast<std::size_t>(n), seed + 1);
    evaluate_objective(data, state.params, perm, weights, &state.grads);
    auto blocks = param_blocks(state.params);
    const auto grads = param_blocks(std::as_const(state.grads));
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        s.checks.push_back({"objective " + blocks[b].name,
                            testing::max_fd_error(blocks[b].values.data(), blocks[b].values.size(),
                                                  grads[b].values.data(), [&] {
                                                      return evaluate_objective(data, state.params, perm, weights,
                                                                                nullptr)
                                                          .total;
                                                  })});
    }
    return s.checks;
}

} // namespace gradient_suite

#endif // MEDPLEX_TEST_GRADIENT_SUITE_HPP
