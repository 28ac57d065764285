#include "medplex/metrics.hpp"

#include "medplex/hashing.hpp"

#include <algorithm>
#include <numeric>

namespace medplex {

namespace {

double ratio(long num, long den) {
    return den > 0 ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
}

double harmonic(double p, double r) {
    if (p + r <= 0.0) return 0.0;
    // Exact when p == r; 2pr/(p+r) can round away from p.
    if (p == r) return p;
    return 2.0 * p * r / (p + r);
}

} // namespace

ConfusionCounts confusion_counts(std::span<const int> pred, std::span<const int> truth, int num_classes) {
    if (pred.size() != truth.size()) throw DataError("confusion_counts: length mismatch");
    if (num_classes < 1) throw DataError("confusion_counts: need at least one class");
    const auto k = static_cast<std::size_t>(num_classes);
    ConfusionCounts cc;
    cc.tp.assign(k, 0);
    cc.fp.assign(k, 0);
    cc.fn.assign(k, 0);
    cc.tn.assign(k, 0);
    cc.n = static_cast<long>(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (pred[i] < 0 || pred[i] >= num_classes || truth[i] < 0 || truth[i] >= num_classes) {
            throw DataError("confusion_counts: class index out of range at position " + std::to_string(i));
        }
        const auto p = static_cast<std::size_t>(pred[i]);
        const auto t = static_cast<std::size_t>(truth[i]);
        if (p == t) {
            ++cc.tp[p];
        } else {
            ++cc.fp[p];
            ++cc.fn[t];
        }
    }
    for (std::size_t c = 0; c < k; ++c) cc.tn[c] = cc.n - cc.tp[c] - cc.fp[c] - cc.fn[c];
    return cc;
}

std::vector<double> class_precision(const ConfusionCounts& cc) {
    std::vector<double> out;
    for (std::size_t c = 0; c < cc.tp.size(); ++c) out.push_back(ratio(cc.tp[c], cc.tp[c] + cc.fp[c]));
    return out;
}

std::vector<double> class_recall(const ConfusionCounts& cc) {
    std::vector<double> out;
    for (std::size_t c = 0; c < cc.tp.size(); ++c) out.push_back(ratio(cc.tp[c], cc.tp[c] + cc.fn[c]));
    return out;
}

double macro_f1(const ConfusionCounts& cc) {
    const auto p = class_precision(cc);
    const auto r = class_recall(cc);
    const auto k = static_cast<double>(cc.tp.size());
    const double p_macro = std::accumulate(p.begin(), p.end(), 0.0) / k;
    const double r_macro = std::accumulate(r.begin(), r.end(), 0.0) / k;
    return harmonic(p_macro, r_macro);
}

double micro_f1(const ConfusionCounts& cc) {
    const long tp = std::accumulate(cc.tp.begin(), cc.tp.end(), 0L);
    const long fp = std::accumulate(cc.fp.begin(), cc.fp.end(), 0L);
    const long fn = std::accumulate(cc.fn.begin(), cc.fn.end(), 0L);
    return harmonic(ratio(tp, tp + fp), ratio(tp, tp + fn));
}

nlohmann::json MetricsReport::to_json() const {
    return {{"kind", kind},
            {"split", split},
            {"macro_f1", macro_f1},
            {"micro_f1", micro_f1},
            {"precision", precision},
            {"recall", recall},
            {"support", support},
            {"evaluated", evaluated},
            {"attention", attention},
            {"seed", seed},
            {"config_hash", config_hash},
            {"mask_hash", mask_hash}};
}

MetricsReport evaluate_split(std::span<const int> pred, const LabelVector& labels, Split which) {
    if (pred.size() != labels.size()) throw DataError("evaluate_split: prediction length mismatch");
    std::vector<int> p;
    std::vector<int> t;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels.mask[i] != which) continue;
        p.push_back(pred[i]);
        t.push_back(labels.labels[i]);
    }
    MetricsReport r;
    r.split = split_name(which);
    r.evaluated = p.size();
    r.mask_hash = mask_hash(labels.mask);
    if (p.empty()) return r;
    const auto cc = confusion_counts(p, t, labels.num_classes);
    r.macro_f1 = macro_f1(cc);
    r.micro_f1 = micro_f1(cc);
    r.precision = class_precision(cc);
    r.recall = class_recall(cc);
    for (std::size_t c = 0; c < cc.tp.size(); ++c) r.support.push_back(cc.tp[c] + cc.fn[c]);
    return r;
}

std::string mask_hash(const std::vector<Split>& mask) {
    std::string bytes;
    bytes.reserve(mask.size());
    for (auto s : mask) bytes.push_back(static_cast<char>('0' + static_cast<int>(s)));
    return sha256_hex(bytes).substr(0, 16);
}

nlohmann::json AttentionReport::to_json() const {
    nlohmann::json rel = nlohmann::json::array();
    for (std::size_t r = 0; r < weights.size(); ++r) {
        rel.push_back({{"relation", r}, {"weight", weights[r]}, {"columns", members[r]}});
    }
    return {{"relations", rel}, {"ranking", ranking}};
}

AttentionReport attention_report(const Parameters& params, const ClusterPartition& partition,
                                 const std::vector<std::string>& column_names) {
    const Vector w = softmax(params.attention_logits);
    AttentionReport r;
    r.weights.assign(w.data(), w.data() + w.size());
    r.ranking.resize(r.weights.size());
    std::iota(r.ranking.begin(), r.ranking.end(), 0);
    std::stable_sort(r.ranking.begin(), r.ranking.end(),
                     [&](int a, int b) { return r.weights[static_cast<std::size_t>(a)] > r.weights[static_cast<std::size_t>(b)]; });
    r.members.resize(r.weights.size());
    for (std::size_t col = 0; col < partition.assignment.size(); ++col) {
        const auto t = static_cast<std::size_t>(partition.assignment[col]);
        if (t < r.members.size()) r.members[t].push_back(column_names.at(col));
    }
    return r;
}

} // namespace medplex
