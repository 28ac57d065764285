#ifndef MEDPLEX_GRAPH_HPP
#define MEDPLEX_GRAPH_HPP

#include "medplex/clustering.hpp"
#include "medplex/data.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace medplex {

struct Edge {
    std::uint32_t i = 0;
    std::uint32_t j = 0;
    double weight = 1.0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// One relation's similarity graph. Stores each undirected edge once with i < j,
/// sorted by (i, j); self-loops are never stored.
struct RelationGraph {
    std::size_t n = 0;
    std::vector<Edge> edges;
    int relation = 0;
    double threshold = 0.0;
    bool weighted = false;

    std::vector<std::size_t> degrees() const;
    bool has_edge(std::uint32_t a, std::uint32_t b) const;
    Matrix dense_adjacency() const;
};

struct MultiplexGraph {
    std::vector<RelationGraph> relations;
    NodeAttributes attributes;
    ClusterPartition partition;
    std::vector<std::string> row_ids;
    std::vector<std::string> column_names;
    ColumnTransform feature_transform;
    ColumnTransform embedding_transform;

    std::size_t num_nodes() const { return static_cast<std::size_t>(attributes.x.rows()); }
};

/// a.b / (|a||b|), or 0 when either vector has zero norm.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// Columns `cols` of `c`, in the given order.
Matrix column_slice(const Matrix& c, const std::vector<std::size_t>& cols);

/// Edge (i, j) iff cosine(row i, row j) > theta.
RelationGraph build_relation_graph(const Matrix& rows, double theta, int relation = 0);

/// One relation graph per partition type, built on that type's column slice of the
/// normalized tabular block `c`.
MultiplexGraph build_multiplex(const FeatureTable& c, const ClusterPartition& p, std::span<const double> thetas,
                               const NodeAttributes& x);

/// Complete graph with weight max(cosine, 0).
RelationGraph build_weighted_full_graph(const Matrix& rows);

/// Appends new patients (raw values; the graph's stored transforms are applied) and
/// connects them to existing nodes only, per relation, with the same threshold rule.
MultiplexGraph attach_new_nodes(const MultiplexGraph& g, const FeatureTable& c_new, const EmbeddingTable& z_new);

/// Mean cosine similarity over all pairs (i in class a, j in class b, i != j).
/// Rows with label -1 are ignored. `columns` restricts the comparison to a column subset.
Matrix pairwise_class_similarity(const Matrix& c, const std::vector<int>& labels, int num_classes,
                                 const std::optional<std::vector<std::size_t>>& columns = std::nullopt);

/// Text lines `i j` (or `i j weight`), 0-indexed, i < j.
void write_edge_list(const std::filesystem::path& path, const RelationGraph& g);
RelationGraph read_edge_list(const std::filesystem::path& path, std::size_t n, bool weighted);

/// Writes multiplex.json (sizes, thresholds, partition, transforms, row ids) and one
/// relation_<r>.edges per relation. Returns the file names written.
std::vector<std::string> write_multiplex_dir(const std::filesystem::path& dir, const MultiplexGraph& g);

/// Reads a graph directory. Node attributes are rebuilt from the raw cohort tables with
/// the stored transforms, so they match the graph that was written.
MultiplexGraph read_multiplex_dir(const std::filesystem::path& dir, const FeatureTable& c, const EmbeddingTable& z);

} // namespace medplex

#endif // MEDPLEX_GRAPH_HPP
