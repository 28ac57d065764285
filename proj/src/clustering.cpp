#include "medplex/clustering.hpp"

#include "medplex/kernels.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <random>
#include <set>

namespace medplex {

const char* partition_source_name(PartitionSource s) {
    return s == PartitionSource::manual ? "manual" : "kmeans";
}

std::vector<std::size_t> ClusterPartition::columns_of(int type) const {
    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < assignment.size(); ++j) {
        if (assignment[j] == type) cols.push_back(j);
    }
    return cols;
}

void ClusterPartition::validate() const {
    if (num_types < 1) throw DataError("partition: need at least one type");
    std::vector<std::size_t> sizes(static_cast<std::size_t>(num_types), 0);
    for (int t : assignment) {
        if (t < 0 || t >= num_types) throw DataError("partition: type index out of range");
        ++sizes[static_cast<std::size_t>(t)];
    }
    for (std::size_t t = 0; t < sizes.size(); ++t) {
        if (sizes[t] == 0) throw DataError("partition: type " + std::to_string(t) + " is empty");
    }
}

double wcss(const Matrix& points, const std::vector<int>& assignment, int k) {
    Matrix centroids = Matrix::Zero(k, points.cols());
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        centroids.row(assignment[static_cast<std::size_t>(i)]) += points.row(i);
        ++counts[static_cast<std::size_t>(assignment[static_cast<std::size_t>(i)])];
    }
    for (int c = 0; c < k; ++c) {
        if (counts[static_cast<std::size_t>(c)] > 0) centroids.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
    }
    double total = 0.0;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        total += (points.row(i) - centroids.row(assignment[static_cast<std::size_t>(i)])).squaredNorm();
    }
    return total;
}

namespace {

Matrix kmeanspp_init(const Matrix& points, int k, std::mt19937_64& rng) {
    const auto n = points.rows();
    Matrix centroids(k, points.cols());
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    centroids.row(0) = points.row(pick(rng));
    std::vector<double> d2(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            auto& d = d2[static_cast<std::size_t>(i)];
            d = std::min(d, (points.row(i) - centroids.row(c - 1)).squaredNorm());
            total += d;
        }
        Eigen::Index chosen = 0;
        if (total > 0.0) {
            std::uniform_real_distribution<double> u(0.0, total);
            double target = u(rng);
            chosen = n - 1;
            for (Eigen::Index i = 0; i < n; ++i) {
                target -= d2[static_cast<std::size_t>(i)];
                if (target < 0.0) {
                    chosen = i;
                    break;
                }
            }
        } else {
            // Every point coincides with a centroid; any choice is optimal.
            chosen = pick(rng);
        }
        centroids.row(c) = points.row(chosen);
    }
    return centroids;
}

Matrix cluster_means(const Matrix& points, const std::vector<int>& assignment, int k) {
    Matrix centroids = Matrix::Zero(k, points.cols());
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        const auto c = assignment[static_cast<std::size_t>(i)];
        centroids.row(c) += points.row(i);
        ++counts[static_cast<std::size_t>(c)];
    }
    for (int c = 0; c < k; ++c) centroids.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
    return centroids;
}

/// Moves the point farthest from its centroid (taken from a cluster with >= 2 members)
/// into every empty cluster.
void repair_empty(std::vector<int>& assignment, std::vector<double>& distance, int k) {
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (int a : assignment) ++counts[static_cast<std::size_t>(a)];
    for (int c = 0; c < k; ++c) {
        if (counts[static_cast<std::size_t>(c)] > 0) continue;
        std::size_t far = assignment.size();
        double far_d = -1.0;
        for (std::size_t i = 0; i < assignment.size(); ++i) {
            if (counts[static_cast<std::size_t>(assignment[i])] < 2) continue;
            if (distance[i] > far_d) {
                far_d = distance[i];
                far = i;
            }
        }
        --counts[static_cast<std::size_t>(assignment[far])];
        assignment[far] = c;
        distance[far] = 0.0;
        ++counts[static_cast<std::size_t>(c)];
    }
}

KMeansRun lloyd(const Matrix& points, int k, int max_iters, std::mt19937_64& rng) {
    KMeansRun run;
    Matrix centroids = kmeanspp_init(points, k, rng);
    std::vector<double> distance;
    kernels::parallel::nearest_centroid(points, centroids, run.assignment, distance);
    run.initial_wcss = 0.0;
    for (double d : distance) run.initial_wcss += d;

    std::vector<int> previous;
    for (int iter = 0; iter < max_iters; ++iter) {
        previous = run.assignment;
        if (iter > 0) kernels::parallel::nearest_centroid(points, centroids, run.assignment, distance);
        repair_empty(run.assignment, distance, k);
        centroids = cluster_means(points, run.assignment, k);
        run.trace.push_back(wcss(points, run.assignment, k));
        if (iter > 0 && run.assignment == previous) break;
    }
    run.wcss = run.trace.empty() ? run.initial_wcss : run.trace.back();
    return run;
}

} // namespace

KMeansResult kmeans_rows(const Matrix& points, const KMeansOptions& options) {
    const auto n = points.rows();
    if (options.k < 1) throw UsageError("kmeans: k must be >= 1");
    if (options.k > n) {
        throw DataError("kmeans: k = " + std::to_string(options.k) + " exceeds the " + std::to_string(n) +
                        " points to cluster");
    }
    if (options.restarts < 1 || options.max_iters < 1) throw UsageError("kmeans: restarts and max_iters must be >= 1");

    KMeansResult result;
    result.runs.resize(static_cast<std::size_t>(options.restarts));
#pragma omp parallel for schedule(dynamic, 1)
    for (int r = 0; r < options.restarts; ++r) {
        std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                          static_cast<std::uint32_t>(r)};
        std::mt19937_64 rng(seq);
        result.runs[static_cast<std::size_t>(r)] = lloyd(points, options.k, options.max_iters, rng);
    }
    for (std::size_t r = 0; r < result.runs.size(); ++r) {
        if (r == 0 || result.runs[r].wcss < result.wcss) {
            result.wcss = result.runs[r].wcss;
            result.best_restart = r;
        }
    }
    result.partition.assignment = result.runs[result.best_restart].assignment;
    result.partition.num_types = options.k;
    result.partition.source = PartitionSource::kmeans;
    result.partition.validate();
    return result;
}

KMeansResult kmeans_columns(const FeatureTable& c, const KMeansOptions& options) {
    if (options.k > static_cast<int>(c.cols())) {
        throw DataError("kmeans_columns: k = " + std::to_string(options.k) + " exceeds " + std::to_string(c.cols()) +
                        " columns");
    }
    const Matrix points = c.values.transpose();
    return kmeans_rows(points, options);
}

ClusterPartition partition_from_json(const nlohmann::json& j, const FeatureTable& c, PartitionSource source) {
    if (!j.is_object()) throw DataError("manual split: expected a JSON object");
    ClusterPartition p;
    p.source = source;
    p.assignment.assign(c.cols(), -1);
    std::set<std::string> known(c.column_names.begin(), c.column_names.end());
    for (const auto& [name, value] : j.items()) {
        if (name == "source") continue;
        if (!known.count(name)) throw DataError("manual split: unknown column '" + name + "'");
        if (!value.is_number_integer()) throw DataError("manual split: type of '" + name + "' is not an integer");
    }
    int max_type = -1;
    for (std::size_t col = 0; col < c.cols(); ++col) {
        const auto& name = c.column_names[col];
        if (!j.contains(name)) throw DataError("manual split: column '" + name + "' is not assigned a type");
        const int t = j.at(name).get<int>();
        if (t < 0) throw DataError("manual split: negative type for '" + name + "'");
        p.assignment[col] = t;
        max_type = std::max(max_type, t);
    }
    p.num_types = max_type + 1;
    p.validate();
    return p;
}

ClusterPartition load_manual_split(const std::filesystem::path& path, const FeatureTable& c) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    return partition_from_json(j, c, PartitionSource::manual);
}

nlohmann::json partition_to_json(const ClusterPartition& p, const std::vector<std::string>& column_names) {
    nlohmann::json j = nlohmann::json::object();
    for (std::size_t col = 0; col < p.assignment.size(); ++col) j[column_names[col]] = p.assignment[col];
    j["source"] = partition_source_name(p.source);
    return j;
}

ClusterPartition partition_from_export(const nlohmann::json& j, const std::vector<std::string>& column_names) {
    FeatureTable shape;
    shape.column_names = column_names;
    shape.values.resize(0, static_cast<Eigen::Index>(column_names.size()));
    const auto source = j.value("source", std::string("manual")) == "kmeans" ? PartitionSource::kmeans
                                                                            : PartitionSource::manual;
    return partition_from_json(j, shape, source);
}

} // namespace medplex
