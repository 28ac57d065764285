#ifndef MEDPLEX_DATA_HPP
#define MEDPLEX_DATA_HPP

#include "medplex/common.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace medplex {

enum class ColumnKind { numeric, ordinal };

/// Patients x tabular clinical features.
struct FeatureTable {
    Matrix values;
    std::vector<std::string> column_names;
    std::vector<ColumnKind> column_kinds;
    std::vector<std::string> row_ids;
    /// Number of cells filled by column-mean imputation at load time.
    std::size_t imputed_cells = 0;

    std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }

    /// Throws DataError if any invariant (finite, aligned metadata, unique ids) fails.
    void validate() const;
};

/// Precomputed image embeddings, one row per patient.
struct EmbeddingTable {
    Matrix values;
    std::vector<std::string> row_ids;

    std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }
};

enum class Split : std::uint8_t { train, val, test, unlabeled };

const char* split_name(Split s);

/// Class indices plus a train/val/test/unlabeled mask. A label of -1 means unknown.
struct LabelVector {
    std::vector<int> labels;
    std::vector<Split> mask;
    int num_classes = 0;

    std::size_t size() const { return labels.size(); }
    std::vector<std::size_t> indices(Split s) const;
    void validate() const;
};

/// X = [Z | C].
struct NodeAttributes {
    Matrix x;
    std::size_t embedding_dim = 0;
    std::size_t tabular_dim = 0;

    Matrix embedding_block() const { return x.leftCols(static_cast<Eigen::Index>(embedding_dim)); }
    Matrix tabular_block() const { return x.rightCols(static_cast<Eigen::Index>(tabular_dim)); }
};

/// Per-column z-score parameters. A zero scale marks a constant column.
struct ColumnTransform {
    std::vector<double> mean;
    std::vector<double> scale;

    Matrix apply(const Matrix& values) const;
    nlohmann::json to_json() const;
    static ColumnTransform from_json(const nlohmann::json& j);
};

ColumnTransform fit_column_transform(const Matrix& values);

struct NormalizedTable {
    FeatureTable table;
    ColumnTransform transform;
};

FeatureTable load_feature_csv(const std::filesystem::path& path);
EmbeddingTable load_embedding_csv(const std::filesystem::path& path);
/// Reads `id,label` rows and aligns them to `row_ids`. Rows absent from the file get label -1.
std::vector<int> load_labels_csv(const std::filesystem::path& path,
                                 const std::vector<std::string>& row_ids);

void write_feature_csv(const std::filesystem::path& path, const FeatureTable& t);
void write_embedding_csv(const std::filesystem::path& path, const EmbeddingTable& t);
void write_labels_csv(const std::filesystem::path& path, const std::vector<std::string>& row_ids,
                      const std::vector<int>& labels);

NormalizedTable normalize_columns(const FeatureTable& t);
NodeAttributes concat_attributes(const EmbeddingTable& z, const FeatureTable& c);

/// One latent group of tabular columns in the synthetic generator.
struct LatentType {
    std::size_t columns = 4;
    double separation = 1.0;
    /// Optional class -> centroid-group map. Classes sharing a group share a centroid,
    /// so the type cannot tell them apart. Empty means every class has its own centroid.
    std::vector<int> class_groups;
};

struct SynthConfig {
    std::size_t n = 300;
    int classes = 3;
    std::vector<LatentType> types;
    std::size_t embedding_dim = 8;
    double embedding_separation = 0.5;
    double noise_std = 1.0;
    /// Per-patient factor shared by every column of a type; it makes columns of one
    /// type correlate so they can be recovered by clustering.
    double factor_std = 1.0;
    std::uint64_t seed = 0;

    void validate() const;
    nlohmann::json to_json() const;
    /// Missing keys keep the two_signal() values.
    static SynthConfig from_json(const nlohmann::json& j);

    /// Two informative types with disjoint signal (A separates class 0, B class 1) plus
    /// two wide noise types. Default cohort of the CLI.
    static SynthConfig two_signal();
    /// One informative type (every class its own centroid) plus three noise types.
    static SynthConfig one_signal();
};

struct SyntheticCohort {
    FeatureTable features;
    EmbeddingTable embeddings;
    LabelVector labels;
    /// Ground-truth latent type of every tabular column.
    std::vector<int> column_types;

    nlohmann::json ground_truth_json() const;
};

SyntheticCohort generate_synthetic_cohort(const SynthConfig& cfg);

struct SplitFractions {
    double train = 0.6;
    double val = 0.1;
    double test = 0.3;
};

/// Stratified split of the labeled rows. Rows with label -1 stay unlabeled.
std::vector<Split> split_masks(const std::vector<int>& labels, SplitFractions fractions,
                               std::uint64_t seed);

/// Keeps `label_fraction * class size` training rows per class and marks the other
/// training rows unlabeled. Validation and test rows are untouched.
std::vector<Split> restrict_training_labels(const std::vector<Split>& mask,
                                           const std::vector<int>& labels,
                                           double label_fraction, std::uint64_t seed);

} // namespace medplex

#endif // MEDPLEX_DATA_HPP
