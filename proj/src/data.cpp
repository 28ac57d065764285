#include "medplex/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <iomanip>
#include <numeric>
#include <queue>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace medplex {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        if (!cell.empty() && cell.back() == '\r') cell.pop_back();
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool is_missing(const std::string& cell) {
    return cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan";
}

bool parse_double(const std::string& cell, double& out) {
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
}

struct RawCsv {
    std::vector<std::string> header;
    std::vector<std::string> ids;
    std::vector<std::vector<std::string>> cells;
};

RawCsv read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    RawCsv raw;
    std::string line;
    if (!std::getline(in, line)) throw DataError(path.string() + ": empty file");
    raw.header = split_csv_line(line);
    for (auto& h : raw.header) h = trim(h);
    if (raw.header.empty()) throw DataError(path.string() + ": empty header");
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != raw.header.size()) {
            throw DataError(path.string() + ": line " + std::to_string(line_no) + " has " +
                            std::to_string(cells.size()) + " cells, header has " +
                            std::to_string(raw.header.size()));
        }
        for (auto& c : cells) c = trim(c);
        raw.ids.push_back(cells.front());
        cells.erase(cells.begin());
        raw.cells.push_back(std::move(cells));
    }
    return raw;
}

void check_unique_ids(const std::vector<std::string>& ids, const std::string& where) {
    std::unordered_set<std::string> seen;
    for (const auto& id : ids) {
        if (!seen.insert(id).second) throw DataError(where + ": duplicate row id '" + id + "'");
    }
}

/// Parses numeric cells; missing cells are filled with the column mean.
Matrix parse_numeric(const RawCsv& raw, const std::string& where, std::size_t& imputed) {
    const auto n = raw.cells.size();
    const auto f = raw.header.size() - 1;
    Matrix values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(f));
    std::vector<std::vector<bool>> missing(f, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < f; ++j) {
            const auto& cell = raw.cells[i][j];
            if (is_missing(cell)) {
                missing[j][i] = true;
                values(i, j) = 0.0;
                continue;
            }
            double v = 0.0;
            if (!parse_double(cell, v)) {
                throw DataError(where + ": row '" + raw.ids[i] + "' column '" + raw.header[j + 1] +
                                "': cannot parse '" + cell + "'");
            }
            values(i, j) = v;
        }
    }
    imputed = 0;
    for (std::size_t j = 0; j < f; ++j) {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!missing[j][i]) {
                sum += values(i, j);
                ++count;
            }
        }
        if (count == n) continue;
        if (count == 0) throw DataError(where + ": column '" + raw.header[j + 1] + "' has no values");
        const double mean = sum / static_cast<double>(count);
        for (std::size_t i = 0; i < n; ++i) {
            if (missing[j][i]) {
                values(i, j) = mean;
                ++imputed;
            }
        }
    }
    return values;
}

std::string format_double(double v) {
    std::ostringstream out;
    out << std::setprecision(17) << v;
    return out.str();
}

void write_matrix_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                      const std::vector<std::string>& ids, const Matrix& values) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << "id";
    for (const auto& h : header) out << ',' << h;
    out << '\n';
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        out << ids[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < values.cols(); ++j) out << ',' << format_double(values(i, j));
        out << '\n';
    }
}

} // namespace

const char* split_name(Split s) {
    switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
    case Split::unlabeled: return "unlabeled";
    }
    return "unlabeled";
}

void FeatureTable::validate() const {
    if (column_names.size() != cols() || column_kinds.size() != cols()) {
        throw DataError("feature table: column metadata does not match column count");
    }
    if (row_ids.size() != rows()) throw DataError("feature table: row id count mismatch");
    if (!values.allFinite()) throw DataError("feature table: non-finite entries");
    check_unique_ids(row_ids, "feature table");
}

std::vector<std::size_t> LabelVector::indices(Split s) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i] == s) out.push_back(i);
    }
    return out;
}

void LabelVector::validate() const {
    if (mask.size() != labels.size()) throw DataError("labels: mask length mismatch");
    if (num_classes < 1) throw DataError("labels: need at least one class");
    std::vector<bool> seen(static_cast<std::size_t>(num_classes), false);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int y = labels[i];
        if (y < -1 || y >= num_classes) throw DataError("labels: class index out of range");
        if (y == -1 && mask[i] != Split::unlabeled) {
            throw DataError("labels: row " + std::to_string(i) + " is masked " + split_name(mask[i]) +
                            " but has no label");
        }
        if (y >= 0) seen[static_cast<std::size_t>(y)] = true;
    }
    for (int k = 0; k < num_classes; ++k) {
        if (!seen[static_cast<std::size_t>(k)]) {
            throw DataError("labels: class " + std::to_string(k) + " never appears");
        }
    }
}

Matrix ColumnTransform::apply(const Matrix& values) const {
    if (static_cast<std::size_t>(values.cols()) != mean.size()) {
        throw DataError("column transform: expected " + std::to_string(mean.size()) + " columns, got " +
                        std::to_string(values.cols()));
    }
    Matrix out(values.rows(), values.cols());
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
        const auto col = static_cast<std::size_t>(j);
        if (scale[col] == 0.0) {
            out.col(j).setZero();
        } else {
            out.col(j) = (values.col(j).array() - mean[col]) / scale[col];
        }
    }
    return out;
}

nlohmann::json ColumnTransform::to_json() const {
    return {{"mean", mean}, {"scale", scale}};
}

ColumnTransform ColumnTransform::from_json(const nlohmann::json& j) {
    ColumnTransform t;
    t.mean = j.at("mean").get<std::vector<double>>();
    t.scale = j.at("scale").get<std::vector<double>>();
    if (t.mean.size() != t.scale.size()) throw DataError("column transform: mean/scale length mismatch");
    return t;
}

ColumnTransform fit_column_transform(const Matrix& values) {
    ColumnTransform t;
    const auto n = static_cast<double>(values.rows());
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
        const double mean = values.rows() > 0 ? values.col(j).sum() / n : 0.0;
        double var = 0.0;
        for (Eigen::Index i = 0; i < values.rows(); ++i) {
            const double d = values(i, j) - mean;
            var += d * d;
        }
        var = values.rows() > 0 ? var / n : 0.0;
        const double sd = std::sqrt(var);
        // Relative cutoff: a column of identical values can still show rounding-level spread.
        const bool constant = sd <= 1e-12 * std::max(1.0, std::abs(mean));
        t.mean.push_back(mean);
        t.scale.push_back(constant ? 0.0 : sd);
    }
    return t;
}

FeatureTable load_feature_csv(const std::filesystem::path& path) {
    const auto raw = read_csv(path);
    if (raw.header.size() < 2) throw DataError(path.string() + ": no feature columns");
    check_unique_ids(raw.ids, path.string());
    FeatureTable t;
    t.values = parse_numeric(raw, path.string(), t.imputed_cells);
    t.column_names.assign(raw.header.begin() + 1, raw.header.end());
    t.row_ids = raw.ids;
    for (Eigen::Index j = 0; j < t.values.cols(); ++j) {
        bool integral = true;
        for (Eigen::Index i = 0; i < t.values.rows() && integral; ++i) {
            integral = t.values(i, j) == std::round(t.values(i, j));
        }
        t.column_kinds.push_back(integral ? ColumnKind::ordinal : ColumnKind::numeric);
    }
    t.validate();
    return t;
}

EmbeddingTable load_embedding_csv(const std::filesystem::path& path) {
    const auto raw = read_csv(path);
    check_unique_ids(raw.ids, path.string());
    EmbeddingTable t;
    std::size_t imputed = 0;
    t.values = parse_numeric(raw, path.string(), imputed);
    if (imputed > 0) throw DataError(path.string() + ": embeddings must not have missing cells");
    t.row_ids = raw.ids;
    return t;
}

std::vector<int> load_labels_csv(const std::filesystem::path& path,
                                 const std::vector<std::string>& row_ids) {
    const auto raw = read_csv(path);
    if (raw.header.size() != 2) throw DataError(path.string() + ": expected columns id,label");
    check_unique_ids(raw.ids, path.string());
    std::unordered_map<std::string, std::size_t> position;
    for (std::size_t i = 0; i < row_ids.size(); ++i) position.emplace(row_ids[i], i);
    std::vector<int> labels(row_ids.size(), -1);
    for (std::size_t r = 0; r < raw.ids.size(); ++r) {
        const auto it = position.find(raw.ids[r]);
        if (it == position.end()) throw DataError(path.string() + ": unknown row id '" + raw.ids[r] + "'");
        const auto& cell = raw.cells[r][0];
        if (is_missing(cell)) continue;
        int y = 0;
        auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), y);
        if (ec != std::errc() || ptr != cell.data() + cell.size() || y < 0) {
            throw DataError(path.string() + ": row '" + raw.ids[r] + "': bad label '" + cell + "'");
        }
        labels[it->second] = y;
    }
    return labels;
}

void write_feature_csv(const std::filesystem::path& path, const FeatureTable& t) {
    write_matrix_csv(path, t.column_names, t.row_ids, t.values);
}

void write_embedding_csv(const std::filesystem::path& path, const EmbeddingTable& t) {
    std::vector<std::string> header;
    for (std::size_t j = 0; j < t.cols(); ++j) header.push_back("z" + std::to_string(j));
    write_matrix_csv(path, header, t.row_ids, t.values);
}

void write_labels_csv(const std::filesystem::path& path, const std::vector<std::string>& row_ids,
                      const std::vector<int>& labels) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << "id,label\n";
    for (std::size_t i = 0; i < row_ids.size(); ++i) {
        out << row_ids[i] << ',';
        if (labels[i] >= 0) out << labels[i];
        out << '\n';
    }
}

NormalizedTable normalize_columns(const FeatureTable& t) {
    NormalizedTable out{t, fit_column_transform(t.values)};
    out.table.values = out.transform.apply(t.values);
    return out;
}

NodeAttributes concat_attributes(const EmbeddingTable& z, const FeatureTable& c) {
    const bool no_embeddings = z.cols() == 0;
    if (!no_embeddings) {
        if (z.row_ids.size() != c.row_ids.size()) {
            throw DataError("concat_attributes: " + std::to_string(z.row_ids.size()) + " embedding rows vs " +
                            std::to_string(c.row_ids.size()) + " feature rows");
        }
        for (std::size_t i = 0; i < z.row_ids.size(); ++i) {
            if (z.row_ids[i] != c.row_ids[i]) {
                throw DataError("concat_attributes: row " + std::to_string(i) + " id mismatch: embedding '" +
                                z.row_ids[i] + "' vs feature '" + c.row_ids[i] + "'");
            }
        }
    }
    NodeAttributes a;
    a.embedding_dim = z.cols();
    a.tabular_dim = c.cols();
    a.x.resize(c.values.rows(), static_cast<Eigen::Index>(a.embedding_dim + a.tabular_dim));
    if (!no_embeddings) a.x.leftCols(z.values.cols()) = z.values;
    a.x.rightCols(c.values.cols()) = c.values;
    return a;
}

void SynthConfig::validate() const {
    if (classes < 1) throw UsageError("synth: classes must be >= 1");
    if (n < static_cast<std::size_t>(classes) * 2) throw UsageError("synth: need n >= 2 * classes");
    if (types.empty()) throw UsageError("synth: at least one latent type is required");
    if (noise_std < 0.0 || factor_std < 0.0 || embedding_separation < 0.0) throw UsageError("synth: negative noise or separation");
    for (const auto& t : types) {
        if (t.columns == 0) throw UsageError("synth: latent type with zero columns");
        if (t.separation < 0.0) throw UsageError("synth: separation must be >= 0");
        if (!t.class_groups.empty() && t.class_groups.size() != static_cast<std::size_t>(classes)) {
            throw UsageError("synth: class_groups must list one group per class");
        }
        for (int g : t.class_groups) {
            if (g < 0) throw UsageError("synth: negative class group");
        }
    }
}

nlohmann::json SynthConfig::to_json() const {
    nlohmann::json jt = nlohmann::json::array();
    for (const auto& t : types) {
        nlohmann::json e{{"columns", t.columns}, {"separation", t.separation}};
        if (!t.class_groups.empty()) e["class_groups"] = t.class_groups;
        jt.push_back(e);
    }
    return {{"n", n},
            {"classes", classes},
            {"types", jt},
            {"embedding_dim", embedding_dim},
            {"embedding_separation", embedding_separation},
            {"noise_std", noise_std},
            {"factor_std", factor_std},
            {"seed", seed}};
}

SynthConfig SynthConfig::two_signal() {
    SynthConfig c;
    c.types = {{40, 0.6, {0, 1, 1}}, {40, 0.6, {1, 0, 1}}, {150, 0.0, {}}, {150, 0.0, {}}};
    c.embedding_separation = 0.3;
    c.factor_std = 0.0;
    return c;
}

SynthConfig SynthConfig::one_signal() {
    SynthConfig c = two_signal();
    c.types = {{40, 0.6, {}}, {150, 0.0, {}}, {150, 0.0, {}}, {150, 0.0, {}}};
    return c;
}

SynthConfig SynthConfig::from_json(const nlohmann::json& j) {
    SynthConfig c = two_signal();
    c.n = j.value("n", c.n);
    c.classes = j.value("classes", c.classes);
    c.embedding_dim = j.value("embedding_dim", c.embedding_dim);
    c.embedding_separation = j.value("embedding_separation", c.embedding_separation);
    c.noise_std = j.value("noise_std", c.noise_std);
    c.factor_std = j.value("factor_std", c.factor_std);
    c.seed = j.value("seed", c.seed);
    if (j.contains("types")) {
        c.types.clear();
        for (const auto& e : j.at("types")) {
            LatentType t;
            t.columns = e.value("columns", t.columns);
            t.separation = e.value("separation", t.separation);
            if (e.contains("class_groups")) t.class_groups = e.at("class_groups").get<std::vector<int>>();
            c.types.push_back(t);
        }
    }
    c.validate();
    return c;
}

nlohmann::json SyntheticCohort::ground_truth_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (std::size_t col = 0; col < column_types.size(); ++col) {
        j[features.column_names[col]] = column_types[col];
    }
    return j;
}

SyntheticCohort generate_synthetic_cohort(const SynthConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto n = cfg.n;
    const auto c = static_cast<std::size_t>(cfg.classes);

    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % c);
    std::shuffle(labels.begin(), labels.end(), rng);

    std::size_t total_cols = 0;
    for (const auto& t : cfg.types) total_cols += t.columns;

    // Columns of all types are interleaved in a random order; the ground-truth map records it.
    std::vector<int> column_types;
    for (std::size_t t = 0; t < cfg.types.size(); ++t) {
        column_types.insert(column_types.end(), cfg.types[t].columns, static_cast<int>(t));
    }
    std::vector<std::size_t> column_order(total_cols);
    std::iota(column_order.begin(), column_order.end(), 0);
    std::shuffle(column_order.begin(), column_order.end(), rng);

    Matrix by_type(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(total_cols));
    std::size_t offset = 0;
    for (const auto& type : cfg.types) {
        std::vector<int> groups = type.class_groups;
        if (groups.empty()) {
            groups.resize(c);
            std::iota(groups.begin(), groups.end(), 0);
        }
        const auto num_groups = static_cast<std::size_t>(*std::max_element(groups.begin(), groups.end())) + 1;
        Matrix centroids(static_cast<Eigen::Index>(num_groups), static_cast<Eigen::Index>(type.columns));
        for (Eigen::Index g = 0; g < centroids.rows(); ++g) {
            for (Eigen::Index j = 0; j < centroids.cols(); ++j) centroids(g, j) = type.separation * normal(rng);
        }
        for (std::size_t i = 0; i < n; ++i) {
            const auto g = static_cast<Eigen::Index>(groups[static_cast<std::size_t>(labels[i])]);
            const double shared = cfg.factor_std * normal(rng);
            for (std::size_t j = 0; j < type.columns; ++j) {
                by_type(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(offset + j)) =
                    centroids(g, static_cast<Eigen::Index>(j)) + shared + cfg.noise_std * normal(rng);
            }
        }
        offset += type.columns;
    }

    SyntheticCohort out;
    out.features.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(total_cols));
    out.column_types.resize(total_cols);
    for (std::size_t dst = 0; dst < total_cols; ++dst) {
        const auto src = column_order[dst];
        out.features.values.col(static_cast<Eigen::Index>(dst)) = by_type.col(static_cast<Eigen::Index>(src));
        out.column_types[dst] = column_types[src];
        std::ostringstream name;
        name << 'f' << std::setw(2) << std::setfill('0') << dst;
        out.features.column_names.push_back(name.str());
    }
    out.features.column_kinds.assign(total_cols, ColumnKind::numeric);
    for (std::size_t i = 0; i < n; ++i) {
        std::ostringstream id;
        id << 'p' << std::setw(4) << std::setfill('0') << i;
        out.features.row_ids.push_back(id.str());
    }

    Matrix emb_centroids(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(cfg.embedding_dim));
    for (Eigen::Index k = 0; k < emb_centroids.rows(); ++k) {
        for (Eigen::Index j = 0; j < emb_centroids.cols(); ++j) {
            emb_centroids(k, j) = cfg.embedding_separation * normal(rng);
        }
    }
    out.embeddings.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cfg.embedding_dim));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < cfg.embedding_dim; ++j) {
            out.embeddings.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                emb_centroids(labels[i], static_cast<Eigen::Index>(j)) + cfg.noise_std * normal(rng);
        }
    }
    out.embeddings.row_ids = out.features.row_ids;

    out.labels.labels = labels;
    out.labels.mask.assign(n, Split::unlabeled);
    out.labels.num_classes = cfg.classes;
    return out;
}

namespace {

/// Integer counts per (class, split) that round the exact expectations class by class
/// while keeping every split total within one of its own expectation. Solved as a
/// small max-flow over the fractional cells.
std::vector<std::array<std::size_t, 3>> controlled_rounding(const std::vector<std::size_t>& class_sizes,
                                                            const std::array<double, 3>& fractions) {
    constexpr double snap = 1e-9;
    const auto k = class_sizes.size();
    std::vector<std::array<std::size_t, 3>> counts(k);
    std::vector<std::array<bool, 3>> fractional(k);
    std::vector<long> row_need(k, 0);
    std::array<long, 3> col_cap{};
    std::size_t total = 0;
    for (auto m : class_sizes) total += m;

    for (std::size_t a = 0; a < k; ++a) {
        long assigned = 0;
        for (std::size_t s = 0; s < 3; ++s) {
            const double e = static_cast<double>(class_sizes[a]) * fractions[s];
            const double r = std::round(e);
            if (std::abs(e - r) < snap) {
                counts[a][s] = static_cast<std::size_t>(r);
                fractional[a][s] = false;
            } else {
                counts[a][s] = static_cast<std::size_t>(std::floor(e));
                fractional[a][s] = true;
            }
            assigned += static_cast<long>(counts[a][s]);
        }
        row_need[a] = static_cast<long>(class_sizes[a]) - assigned;
    }
    for (std::size_t s = 0; s < 3; ++s) {
        const double e = static_cast<double>(total) * fractions[s];
        const double r = std::round(e);
        const long cap = std::abs(e - r) < snap ? static_cast<long>(r) : static_cast<long>(std::ceil(e));
        long floors = 0;
        for (std::size_t a = 0; a < k; ++a) floors += static_cast<long>(counts[a][s]);
        col_cap[s] = std::max(0L, cap - floors);
    }

    // Max-flow: source -> class (row_need) -> split (one unit per fractional cell) -> sink (col_cap).
    const std::size_t nodes = k + 5;
    const std::size_t source = 0;
    const std::size_t sink = k + 4;
    std::vector<std::vector<long>> cap(nodes, std::vector<long>(nodes, 0));
    for (std::size_t a = 0; a < k; ++a) {
        cap[source][1 + a] = row_need[a];
        for (std::size_t s = 0; s < 3; ++s) {
            if (fractional[a][s]) cap[1 + a][1 + k + s] = 1;
        }
    }
    for (std::size_t s = 0; s < 3; ++s) cap[1 + k + s][sink] = col_cap[s];
    auto residual = cap;
    while (true) {
        std::vector<std::size_t> parent(nodes, nodes);
        parent[source] = source;
        std::queue<std::size_t> frontier;
        frontier.push(source);
        while (!frontier.empty() && parent[sink] == nodes) {
            const auto u = frontier.front();
            frontier.pop();
            for (std::size_t v = 0; v < nodes; ++v) {
                if (parent[v] == nodes && residual[u][v] > 0) {
                    parent[v] = u;
                    frontier.push(v);
                }
            }
        }
        if (parent[sink] == nodes) break;
        long push = std::numeric_limits<long>::max();
        for (auto v = sink; v != source; v = parent[v]) push = std::min(push, residual[parent[v]][v]);
        for (auto v = sink; v != source; v = parent[v]) {
            residual[parent[v]][v] -= push;
            residual[v][parent[v]] += push;
        }
    }
    std::vector<std::array<bool, 3>> used(k, {false, false, false});
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t s = 0; s < 3; ++s) {
            if (fractional[a][s] && residual[1 + a][1 + k + s] == 0) {
                used[a][s] = true;
                --row_need[a];
            }
        }
        // Fallback if the split caps could not absorb this class: largest remaining fractional part.
        while (row_need[a] > 0) {
            std::size_t best = 3;
            double best_frac = -1.0;
            for (std::size_t s = 0; s < 3; ++s) {
                if (!fractional[a][s] || used[a][s]) continue;
                const double e = static_cast<double>(class_sizes[a]) * fractions[s];
                const double frac = e - std::floor(e);
                if (frac > best_frac) {
                    best_frac = frac;
                    best = s;
                }
            }
            if (best == 3) break;
            used[a][best] = true;
            --row_need[a];
        }
    }
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t s = 0; s < 3; ++s) {
            if (used[a][s]) ++counts[a][s];
        }
    }
    return counts;
}

} // namespace

std::vector<Split> split_masks(const std::vector<int>& labels, SplitFractions fractions, std::uint64_t seed) {
    const std::array<double, 3> f{fractions.train, fractions.val, fractions.test};
    for (double v : f) {
        if (v < 0.0 || v > 1.0) throw UsageError("split_masks: fractions must lie in [0, 1]");
    }
    if (std::abs(f[0] + f[1] + f[2] - 1.0) > 1e-9) throw UsageError("split_masks: fractions must sum to 1");

    int num_classes = 0;
    for (int y : labels) num_classes = std::max(num_classes, y + 1);
    std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(num_classes));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] >= 0) members[static_cast<std::size_t>(labels[i])].push_back(i);
    }
    std::vector<std::size_t> sizes;
    for (std::size_t k = 0; k < members.size(); ++k) {
        if (members[k].size() < 3) {
            throw DataError("split_masks: class " + std::to_string(k) + " has " + std::to_string(members[k].size()) +
                            " members; stratification needs at least 3");
        }
        sizes.push_back(members[k].size());
    }
    const auto counts = controlled_rounding(sizes, f);

    std::vector<Split> mask(labels.size(), Split::unlabeled);
    std::mt19937_64 rng(seed);
    for (std::size_t k = 0; k < members.size(); ++k) {
        auto rows = members[k];
        std::shuffle(rows.begin(), rows.end(), rng);
        std::size_t pos = 0;
        for (std::size_t s = 0; s < 3; ++s) {
            for (std::size_t c = 0; c < counts[k][s]; ++c) mask[rows[pos++]] = static_cast<Split>(s);
        }
    }
    return mask;
}

std::vector<Split> restrict_training_labels(const std::vector<Split>& mask, const std::vector<int>& labels,
                                           double label_fraction, std::uint64_t seed) {
    if (label_fraction <= 0.0 || label_fraction > 1.0) {
        throw UsageError("label fraction must lie in (0, 1]");
    }
    int num_classes = 0;
    for (int y : labels) num_classes = std::max(num_classes, y + 1);
    std::vector<std::size_t> class_size(static_cast<std::size_t>(num_classes), 0);
    std::vector<std::vector<std::size_t>> train_rows(static_cast<std::size_t>(num_classes));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0) continue;
        ++class_size[static_cast<std::size_t>(labels[i])];
        if (mask[i] == Split::train) train_rows[static_cast<std::size_t>(labels[i])].push_back(i);
    }
    auto out = mask;
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    for (std::size_t k = 0; k < train_rows.size(); ++k) {
        auto rows = train_rows[k];
        std::shuffle(rows.begin(), rows.end(), rng);
        auto keep = static_cast<std::size_t>(std::llround(label_fraction * static_cast<double>(class_size[k])));
        keep = std::clamp<std::size_t>(keep, std::min<std::size_t>(1, rows.size()), rows.size());
        for (std::size_t r = keep; r < rows.size(); ++r) out[rows[r]] = Split::unlabeled;
    }
    return out;
}

} // namespace medplex
