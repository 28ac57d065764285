#ifndef MEDPLEX_CLUSTERING_HPP
#define MEDPLEX_CLUSTERING_HPP

#include "medplex/data.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace medplex {

enum class PartitionSource { kmeans, manual };

const char* partition_source_name(PartitionSource s);

/// Disjoint assignment of tabular columns to relation types.
struct ClusterPartition {
    std::vector<int> assignment;
    int num_types = 0;
    PartitionSource source = PartitionSource::kmeans;

    std::vector<std::size_t> columns_of(int type) const;
    /// Throws DataError unless every column has a type in range and every type is non-empty.
    void validate() const;
};

struct KMeansOptions {
    int k = 2;
    int restarts = 20;
    int max_iters = 300;
    std::uint64_t seed = 0;
};

struct KMeansRun {
    std::vector<int> assignment;
    double initial_wcss = 0.0;
    /// WCSS after every Lloyd iteration (assignment, empty-cluster repair, centroid update).
    std::vector<double> trace;
    double wcss = 0.0;
};

struct KMeansResult {
    ClusterPartition partition;
    double wcss = 0.0;
    std::size_t best_restart = 0;
    std::vector<KMeansRun> runs;
};

/// Within-cluster sum of squares of `points` rows under `assignment`.
double wcss(const Matrix& points, const std::vector<int>& assignment, int k);

/// Lloyd's algorithm with k-means++ seeding over the rows of `points`.
KMeansResult kmeans_rows(const Matrix& points, const KMeansOptions& options);

/// Clusters the columns of a (normalized) feature table into `k` relation types.
KMeansResult kmeans_columns(const FeatureTable& c, const KMeansOptions& options);

ClusterPartition partition_from_json(const nlohmann::json& j, const FeatureTable& c,
                                     PartitionSource source = PartitionSource::manual);
ClusterPartition load_manual_split(const std::filesystem::path& path, const FeatureTable& c);
/// `{column_name: type_index, ..., "source": "kmeans"|"manual"}`.
nlohmann::json partition_to_json(const ClusterPartition& p, const std::vector<std::string>& column_names);
/// Inverse of partition_to_json; the "source" field is honored when present.
ClusterPartition partition_from_export(const nlohmann::json& j, const std::vector<std::string>& column_names);

} // namespace medplex

#endif // MEDPLEX_CLUSTERING_HPP
