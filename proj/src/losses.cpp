#include "medplex/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace medplex {

InfomaxResult infomax_loss(const Matrix& h, const Matrix& h_tilde, const Vector& s, const Matrix& m) {
    if (h.rows() != h_tilde.rows() || h.cols() != h_tilde.cols() || h.cols() != s.size() || m.rows() != s.size() ||
        m.cols() != s.size()) {
        throw DataError("infomax_loss: shape mismatch");
    }
    const auto n = h.rows();
    const double scale = 1.0 / static_cast<double>(2 * n);
    const Vector ms = m * s;
    const Vector pos_logits = h * ms;
    const Vector neg_logits = h_tilde * ms;

    InfomaxResult r;
    Vector g_pos(n);
    Vector g_neg(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double p = logistic(pos_logits[i]);
        const double q = logistic(neg_logits[i]);
        const double pc = std::clamp(p, kProbFloor, 1.0 - kProbFloor);
        const double qc = std::clamp(q, kProbFloor, 1.0 - kProbFloor);
        r.loss -= scale * (std::log(pc) + std::log(1.0 - qc));
        // d(-log p)/du = -(1 - p) and d(-log(1 - q))/du = q; zero where the clamp is active.
        g_pos[i] = (p == pc) ? -scale * (1.0 - p) : 0.0;
        g_neg[i] = (q == qc) ? scale * q : 0.0;
    }
    r.d_h = g_pos * ms.transpose();
    r.d_h_tilde = g_neg * ms.transpose();
    const Vector weighted = h.transpose() * g_pos + h_tilde.transpose() * g_neg;
    r.d_m = weighted * s.transpose();
    r.d_s = m.transpose() * weighted;
    return r;
}

ConsensusResult consensus_loss(const Matrix& o, const Matrix& pooled_clean, const Matrix& pooled_corrupt) {
    if (o.rows() != pooled_clean.rows() || o.cols() != pooled_clean.cols() || o.rows() != pooled_corrupt.rows() ||
        o.cols() != pooled_corrupt.cols()) {
        throw DataError("consensus_loss: shape mismatch");
    }
    const double scale = 1.0 / static_cast<double>(o.size());
    const Matrix diff_clean = o - pooled_clean;
    const Matrix diff_corrupt = o - pooled_corrupt;
    ConsensusResult r;
    r.loss = scale * (diff_clean.squaredNorm() - diff_corrupt.squaredNorm());
    r.d_o = 2.0 * scale * (diff_clean - diff_corrupt);
    r.d_clean = -2.0 * scale * diff_clean;
    r.d_corrupt = 2.0 * scale * diff_corrupt;
    return r;
}

PooledConsensusResult consensus_loss_pooled(const Matrix& o, std::span<const Matrix> hs,
                                            std::span<const Matrix> hs_tilde, const Vector& att_logits) {
    const auto clean = attentive_pool(hs, att_logits);
    const auto corrupt = attentive_pool(hs_tilde, att_logits);
    PooledConsensusResult r;
    r.consensus = consensus_loss(o, clean.pooled, corrupt.pooled);
    auto g_clean = attentive_pool_backward(hs, clean.weights, r.consensus.d_clean);
    auto g_corrupt = attentive_pool_backward(hs_tilde, corrupt.weights, r.consensus.d_corrupt);
    r.d_hs = std::move(g_clean.dhs);
    r.d_hs_tilde = std::move(g_corrupt.dhs);
    r.consensus.d_logits = g_clean.d_logits + g_corrupt.d_logits;
    return r;
}

SupervisedResult supervised_loss(const Matrix& y_hat, const std::vector<int>& labels,
                                 const std::vector<std::size_t>& rows) {
    if (rows.empty()) throw DataError("supervised_loss: no labeled training rows");
    if (labels.size() != static_cast<std::size_t>(y_hat.rows())) throw DataError("supervised_loss: label length mismatch");
    const double scale = 1.0 / static_cast<double>(rows.size());
    SupervisedResult r;
    r.d_y_hat = Matrix::Zero(y_hat.rows(), y_hat.cols());
    for (auto i : rows) {
        const int y = labels[i];
        if (y < 0 || y >= y_hat.cols()) throw DataError("supervised_loss: row " + std::to_string(i) + " has no valid label");
        const double p = y_hat(static_cast<Eigen::Index>(i), y);
        const double pc = std::clamp(p, kProbFloor, 1.0);
        r.loss -= scale * std::log(pc);
        if (p == pc) r.d_y_hat(static_cast<Eigen::Index>(i), y) = -scale / p;
    }
    return r;
}

double total_loss(const LossComponents& c, const LossWeights& w) {
    double relations = 0.0;
    for (double l : c.infomax) relations += l;
    return relations + w.alpha * c.consensus + w.beta * c.supervised + w.gamma * c.l2;
}

double total_loss(LossComponents c, const LossWeights& w, const Parameters& params) {
    c.l2 = params.squared_norm();
    return total_loss(c, w);
}

double micle_loss(const Matrix& view1, const Matrix& view2, double tau) {
    if (!(tau > 0.0)) throw UsageError("micle_loss: temperature must be > 0");
    if (view1.rows() != view2.rows() || view1.cols() != view2.cols()) throw DataError("micle_loss: view shape mismatch");
    const auto n = view1.rows();
    if (n < 2) throw DataError("micle_loss: need at least two patients");

    Matrix views(2 * n, view1.cols());
    views.topRows(n) = view1;
    views.bottomRows(n) = view2;
    for (Eigen::Index i = 0; i < views.rows(); ++i) {
        const double norm = views.row(i).norm();
        if (norm > 0.0) views.row(i) /= norm;
    }
    const Matrix sim = views * views.transpose();

    double total = 0.0;
    for (Eigen::Index a = 0; a < 2 * n; ++a) {
        const Eigen::Index positive = a < n ? a + n : a - n;
        // log-sum-exp over every view except the anchor itself.
        double top = -std::numeric_limits<double>::infinity();
        for (Eigen::Index k = 0; k < 2 * n; ++k) {
            if (k != a) top = std::max(top, sim(a, k) / tau);
        }
        double denom = 0.0;
        for (Eigen::Index k = 0; k < 2 * n; ++k) {
            if (k != a) denom += std::exp(sim(a, k) / tau - top);
        }
        total += -(sim(a, positive) / tau - top - std::log(denom));
    }
    return total / static_cast<double>(2 * n);
}

} // namespace medplex
