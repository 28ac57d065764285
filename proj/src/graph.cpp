#include "medplex/graph.hpp"

#include "medplex/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace medplex {

std::vector<std::size_t> RelationGraph::degrees() const {
    std::vector<std::size_t> deg(n, 0);
    for (const auto& e : edges) {
        ++deg[e.i];
        ++deg[e.j];
    }
    return deg;
}

bool RelationGraph::has_edge(std::uint32_t a, std::uint32_t b) const {
    if (a > b) std::swap(a, b);
    const Edge key{a, b, 0.0};
    return std::binary_search(edges.begin(), edges.end(), key, [](const Edge& x, const Edge& y) {
        return x.i != y.i ? x.i < y.i : x.j < y.j;
    });
}

Matrix RelationGraph::dense_adjacency() const {
    Matrix a = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (const auto& e : edges) {
        a(e.i, e.j) = e.weight;
        a(e.j, e.i) = e.weight;
    }
    return a;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DataError("cosine_similarity: length mismatch");
    const double na = std::sqrt(kernels::dot(a.data(), a.data(), a.size()));
    const double nb = std::sqrt(kernels::dot(b.data(), b.data(), b.size()));
    if (na == 0.0 || nb == 0.0) return 0.0;
    return kernels::dot(a.data(), b.data(), a.size()) / (na * nb);
}

Matrix column_slice(const Matrix& c, const std::vector<std::size_t>& cols) {
    Matrix out(c.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) {
        if (cols[k] >= static_cast<std::size_t>(c.cols())) throw DataError("column_slice: column out of range");
        out.col(static_cast<Eigen::Index>(k)) = c.col(static_cast<Eigen::Index>(cols[k]));
    }
    return out;
}

RelationGraph build_relation_graph(const Matrix& rows, double theta, int relation) {
    if (!(theta >= -1.0 && theta <= 1.0)) throw UsageError("build_relation_graph: threshold must lie in [-1, 1]");
    RelationGraph g;
    g.n = static_cast<std::size_t>(rows.rows());
    g.relation = relation;
    g.threshold = theta;
    for (const auto& [i, j] : kernels::parallel::threshold_pairs(rows, theta)) g.edges.push_back({i, j, 1.0});
    return g;
}

MultiplexGraph build_multiplex(const FeatureTable& c, const ClusterPartition& p, std::span<const double> thetas,
                               const NodeAttributes& x) {
    p.validate();
    if (p.assignment.size() != c.cols()) throw DataError("build_multiplex: partition does not cover the columns");
    if (thetas.size() != static_cast<std::size_t>(p.num_types)) {
        throw UsageError("build_multiplex: " + std::to_string(thetas.size()) + " thresholds for " +
                         std::to_string(p.num_types) + " relations");
    }
    if (static_cast<std::size_t>(x.x.rows()) != c.rows()) throw DataError("build_multiplex: attribute row mismatch");
    MultiplexGraph g;
    g.attributes = x;
    g.partition = p;
    g.row_ids = c.row_ids;
    g.column_names = c.column_names;
    for (int r = 0; r < p.num_types; ++r) {
        const Matrix slice = column_slice(c.values, p.columns_of(r));
        g.relations.push_back(build_relation_graph(slice, thetas[static_cast<std::size_t>(r)], r));
    }
    return g;
}

RelationGraph build_weighted_full_graph(const Matrix& rows) {
    if (rows.rows() < 2) throw DataError("build_weighted_full_graph: need at least two nodes");
    const Matrix cos = kernels::parallel::cosine_matrix(rows);
    RelationGraph g;
    g.n = static_cast<std::size_t>(rows.rows());
    g.weighted = true;
    g.threshold = -1.0;
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < rows.rows(); ++j) {
            g.edges.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), std::max(cos(i, j), 0.0)});
        }
    }
    return g;
}

MultiplexGraph attach_new_nodes(const MultiplexGraph& g, const FeatureTable& c_new, const EmbeddingTable& z_new) {
    if (c_new.column_names != g.column_names) {
        throw DataError("attach_new_nodes: new feature columns do not match the training columns");
    }
    const auto m = c_new.rows();
    if (m == 0) return g;
    const auto emb_dim = g.attributes.embedding_dim;
    if (emb_dim > 0 && (z_new.cols() != emb_dim || z_new.rows() != m)) {
        throw DataError("attach_new_nodes: new embeddings must be " + std::to_string(m) + " x " +
                        std::to_string(emb_dim));
    }
    if (emb_dim > 0 && z_new.row_ids != c_new.row_ids) {
        throw DataError("attach_new_nodes: embedding and feature row ids differ");
    }
    for (const auto& id : c_new.row_ids) {
        if (std::find(g.row_ids.begin(), g.row_ids.end(), id) != g.row_ids.end()) {
            throw DataError("attach_new_nodes: row id '" + id + "' already in the graph");
        }
    }

    const auto n0 = g.num_nodes();
    const Matrix c_norm = g.feature_transform.apply(c_new.values);

    MultiplexGraph out = g;
    out.attributes.x.conservativeResize(static_cast<Eigen::Index>(n0 + m), Eigen::NoChange);
    if (emb_dim > 0) {
        out.attributes.x.bottomLeftCorner(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(emb_dim)) =
            g.embedding_transform.apply(z_new.values);
    }
    out.attributes.x.bottomRightCorner(static_cast<Eigen::Index>(m), c_norm.cols()) = c_norm;
    out.row_ids.insert(out.row_ids.end(), c_new.row_ids.begin(), c_new.row_ids.end());

    const Matrix tabular = out.attributes.tabular_block();
    for (auto& rel : out.relations) {
        const Matrix slice = column_slice(tabular, g.partition.columns_of(rel.relation));
        rel.n = n0 + m;
        for (const auto& [i, j] : kernels::parallel::threshold_pairs_bipartite(slice, n0, rel.threshold)) {
            rel.edges.push_back({i, j, 1.0});
        }
        std::sort(rel.edges.begin(), rel.edges.end(),
                  [](const Edge& a, const Edge& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
    }
    return out;
}

Matrix pairwise_class_similarity(const Matrix& c, const std::vector<int>& labels, int num_classes,
                                 const std::optional<std::vector<std::size_t>>& columns) {
    if (labels.size() != static_cast<std::size_t>(c.rows())) throw DataError("class similarity: label length mismatch");
    const Matrix rows = columns ? column_slice(c, *columns) : c;
    const Matrix cos = kernels::parallel::cosine_matrix(rows);
    const auto k = static_cast<std::size_t>(num_classes);
    std::vector<std::size_t> count(k, 0);
    for (int y : labels) {
        if (y >= num_classes) throw DataError("class similarity: label out of range");
        if (y >= 0) ++count[static_cast<std::size_t>(y)];
    }
    for (std::size_t a = 0; a < k; ++a) {
        if (count[a] == 0) throw DataError("class similarity: class " + std::to_string(a) + " has no rows");
    }
    Matrix sum = Matrix::Zero(num_classes, num_classes);
    Matrix pairs = Matrix::Zero(num_classes, num_classes);
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        const int a = labels[static_cast<std::size_t>(i)];
        if (a < 0) continue;
        for (Eigen::Index j = 0; j < rows.rows(); ++j) {
            const int b = labels[static_cast<std::size_t>(j)];
            if (b < 0 || i == j) continue;
            sum(a, b) += cos(i, j);
            pairs(a, b) += 1.0;
        }
    }
    Matrix out(num_classes, num_classes);
    for (int a = 0; a < num_classes; ++a) {
        for (int b = 0; b < num_classes; ++b) {
            // A singleton class has no within-class pair; report perfect self-similarity.
            out(a, b) = pairs(a, b) > 0.0 ? sum(a, b) / pairs(a, b) : 1.0;
        }
    }
    return out;
}

void write_edge_list(const std::filesystem::path& path, const RelationGraph& g) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << std::setprecision(17);
    for (const auto& e : g.edges) {
        out << e.i << ' ' << e.j;
        if (g.weighted) out << ' ' << e.weight;
        out << '\n';
    }
}

RelationGraph read_edge_list(const std::filesystem::path& path, std::size_t n, bool weighted) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    RelationGraph g;
    g.n = n;
    g.weighted = weighted;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream fields(line);
        Edge e;
        if (!(fields >> e.i >> e.j) || (weighted && !(fields >> e.weight))) {
            throw DataError(path.string() + ": malformed line " + std::to_string(line_no));
        }
        if (e.i >= e.j || e.j >= n) throw DataError(path.string() + ": bad edge on line " + std::to_string(line_no));
        g.edges.push_back(e);
    }
    std::sort(g.edges.begin(), g.edges.end(),
              [](const Edge& a, const Edge& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
    return g;
}

std::vector<std::string> write_multiplex_dir(const std::filesystem::path& dir, const MultiplexGraph& g) {
    std::filesystem::create_directories(dir);
    std::vector<std::string> files{"multiplex.json"};
    nlohmann::json rel = nlohmann::json::array();
    for (std::size_t r = 0; r < g.relations.size(); ++r) {
        const auto& rg = g.relations[r];
        const std::string name = "relation_" + std::to_string(r) + ".edges";
        write_edge_list(dir / name, rg);
        files.push_back(name);
        rel.push_back({{"relation", rg.relation},
                       {"threshold", rg.threshold},
                       {"weighted", rg.weighted},
                       {"edges", rg.edges.size()},
                       {"file", name}});
    }
    const nlohmann::json j{{"format", "medplex-multiplex"},
                           {"nodes", g.num_nodes()},
                           {"embedding_dim", g.attributes.embedding_dim},
                           {"tabular_dim", g.attributes.tabular_dim},
                           {"relations", rel},
                           {"partition", partition_to_json(g.partition, g.column_names)},
                           {"feature_transform", g.feature_transform.to_json()},
                           {"embedding_transform", g.embedding_transform.to_json()},
                           {"row_ids", g.row_ids}};
    std::ofstream out(dir / "multiplex.json");
    if (!out) throw DataError("cannot write " + (dir / "multiplex.json").string());
    out << j.dump(2) << '\n';
    return files;
}

MultiplexGraph read_multiplex_dir(const std::filesystem::path& dir, const FeatureTable& c, const EmbeddingTable& z) {
    std::ifstream in(dir / "multiplex.json");
    if (!in) throw DataError("cannot open " + (dir / "multiplex.json").string());
    MultiplexGraph g;
    try {
        const auto j = nlohmann::json::parse(in);
        if (j.value("format", "") != "medplex-multiplex") throw DataError("multiplex.json: unknown format");
        g.row_ids = j.at("row_ids").get<std::vector<std::string>>();
        if (g.row_ids != c.row_ids) throw DataError("graph rows do not match the cohort feature rows");
        g.column_names = c.column_names;
        g.partition = partition_from_export(j.at("partition"), c.column_names);
        g.feature_transform = ColumnTransform::from_json(j.at("feature_transform"));
        g.embedding_transform = ColumnTransform::from_json(j.at("embedding_transform"));
        FeatureTable cn = c;
        cn.values = g.feature_transform.apply(c.values);
        EmbeddingTable zn = z;
        if (z.cols() > 0) zn.values = g.embedding_transform.apply(z.values);
        g.attributes = concat_attributes(zn, cn);
        if (g.attributes.embedding_dim != j.at("embedding_dim").get<std::size_t>() ||
            g.attributes.tabular_dim != j.at("tabular_dim").get<std::size_t>()) {
            throw DataError("graph attribute sizes do not match the cohort tables");
        }
        for (const auto& e : j.at("relations")) {
            auto rg = read_edge_list(dir / e.at("file").get<std::string>(), g.row_ids.size(), e.at("weighted").get<bool>());
            rg.relation = e.at("relation").get<int>();
            rg.threshold = e.at("threshold").get<double>();
            if (rg.edges.size() != e.at("edges").get<std::size_t>()) throw DataError("edge count mismatch in " + e.at("file").get<std::string>());
            g.relations.push_back(std::move(rg));
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("multiplex.json: ") + e.what());
    }
    if (g.relations.size() != static_cast<std::size_t>(g.partition.num_types)) {
        throw DataError("multiplex.json: relation count differs from the partition");
    }
    return g;
}

} // namespace medplex
