#ifndef MEDPLEX_SWEEP_HPP
#define MEDPLEX_SWEEP_HPP

#include "medplex/pipeline.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace medplex {

enum class SweepKind { cluster_count, label_fraction, feature_subset };

SweepKind parse_sweep_kind(const std::string& name);
const char* sweep_kind_name(SweepKind k);

struct SweepRow {
    std::string grid_value;
    std::uint64_t seed = 0;
    double macro_f1 = 0.0;
    double micro_f1 = 0.0;
};

struct SweepSummary {
    std::string grid_value;
    double median_micro_f1 = 0.0;
    double iqr_micro_f1 = 0.0;
    double median_macro_f1 = 0.0;
    double iqr_macro_f1 = 0.0;
};

struct SweepResult {
    SweepKind kind = SweepKind::cluster_count;
    std::vector<SweepRow> rows; ///< grid-major, seeds in order
    std::vector<SweepSummary> summary;

    nlohmann::json summary_json() const;
};

struct SweepOptions {
    SweepKind kind = SweepKind::cluster_count;
    /// cluster_count: integers; label_fraction: reals in (0, 1]; feature_subset: type
    /// lists joined by '+', e.g. "0+1".
    std::vector<std::string> grid;
    /// Replicates per grid point. Replicate r runs with seed base.seed + r at every grid
    /// point, so grid points are compared on identical splits.
    int replicates = 5;
    ModelKind model = ModelKind::multiplex;
    /// feature_subset: the partition whose types the grid refers to (k-means at the base
    /// seed when absent). label_fraction: the partition every run uses (k-means per run
    /// when absent). Ignored by cluster_count.
    std::optional<ClusterPartition> partition;
};

SweepResult run_sweep(const Cohort& cohort, const TrainingConfig& base, const SweepOptions& opt);

/// Median and interquartile range with linear interpolation between order statistics.
double median(std::vector<double> v);
double iqr(std::vector<double> v);

void write_sweep_csv(const std::filesystem::path& path, const SweepResult& r);

} // namespace medplex

#endif // MEDPLEX_SWEEP_HPP
