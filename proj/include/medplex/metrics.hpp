#ifndef MEDPLEX_METRICS_HPP
#define MEDPLEX_METRICS_HPP

#include "medplex/clustering.hpp"
#include "medplex/data.hpp"
#include "medplex/model.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace medplex {

/// One-vs-rest counts per class.
struct ConfusionCounts {
    std::vector<long> tp;
    std::vector<long> fp;
    std::vector<long> fn;
    std::vector<long> tn;
    long n = 0;

    int classes() const { return static_cast<int>(tp.size()); }
};

ConfusionCounts confusion_counts(std::span<const int> pred, std::span<const int> truth, int num_classes);

/// TP / (TP + FP) per class; 0 for a class never predicted.
std::vector<double> class_precision(const ConfusionCounts& cc);
/// TP / (TP + FN) per class; 0 for a class absent from the truth.
std::vector<double> class_recall(const ConfusionCounts& cc);

/// Harmonic mean of the class-averaged precision and class-averaged recall.
/// Note this is not the mean of per-class F1 scores.
double macro_f1(const ConfusionCounts& cc);
/// Harmonic mean of pooled precision and recall; equals accuracy for single-label data.
double micro_f1(const ConfusionCounts& cc);

struct MetricsReport {
    std::string kind;
    std::string split;
    double macro_f1 = 0.0;
    double micro_f1 = 0.0;
    std::vector<double> precision;
    std::vector<double> recall;
    std::vector<long> support;
    std::size_t evaluated = 0;
    std::vector<double> attention;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::string mask_hash;

    nlohmann::json to_json() const;
};

/// Metrics over the rows of `labels` whose mask equals `which`.
MetricsReport evaluate_split(std::span<const int> pred, const LabelVector& labels, Split which);

/// Short content hash of a split assignment, shared by runs that use the same masks.
std::string mask_hash(const std::vector<Split>& mask);

struct AttentionReport {
    std::vector<double> weights;
    /// Relation indices by descending weight; ties keep the lower index first.
    std::vector<int> ranking;
    std::vector<std::vector<std::string>> members;

    nlohmann::json to_json() const;
};

AttentionReport attention_report(const Parameters& params, const ClusterPartition& partition,
                                 const std::vector<std::string>& column_names);

} // namespace medplex

#endif // MEDPLEX_METRICS_HPP
