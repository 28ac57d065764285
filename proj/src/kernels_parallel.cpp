#include "medplex/kernels.hpp"

#include <cmath>
#include <limits>

namespace medplex::kernels::parallel {

namespace {

// Rows are handed out dynamically (pair work shrinks with i), but every row writes
// only its own bucket, so the concatenated output is schedule independent.
std::vector<NodePair> flatten(std::vector<std::vector<std::uint32_t>>& buckets) {
    std::size_t total = 0;
    for (const auto& b : buckets) total += b.size();
    std::vector<NodePair> out;
    out.reserve(total);
    for (std::size_t i = 0; i < buckets.size(); ++i) {
        for (auto j : buckets[i]) out.emplace_back(static_cast<std::uint32_t>(i), j);
    }
    return out;
}

} // namespace

std::vector<double> row_norms(const Matrix& rows) {
    const auto d = static_cast<std::size_t>(rows.cols());
    const auto n = rows.rows();
    std::vector<double> norms(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) {
        const double* r = rows.data() + i * rows.cols();
        norms[static_cast<std::size_t>(i)] = std::sqrt(dot(r, r, d));
    }
    return norms;
}

std::vector<NodePair> threshold_pairs(const Matrix& rows, double threshold) {
    const auto norms = row_norms(rows);
    const auto n = rows.rows();
    std::vector<std::vector<std::uint32_t>> buckets(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic, 8)
    for (Eigen::Index i = 0; i < n; ++i) {
        auto& bucket = buckets[static_cast<std::size_t>(i)];
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double c = cosine_from_norms(rows, i, j, norms[static_cast<std::size_t>(i)],
                                               norms[static_cast<std::size_t>(j)]);
            if (c > threshold) bucket.push_back(static_cast<std::uint32_t>(j));
        }
    }
    return flatten(buckets);
}

std::vector<NodePair> threshold_pairs_bipartite(const Matrix& rows, std::size_t existing, double threshold) {
    const auto norms = row_norms(rows);
    const auto split = static_cast<Eigen::Index>(existing);
    const auto n = rows.rows();
    std::vector<std::vector<std::uint32_t>> buckets(existing);
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < split; ++i) {
        auto& bucket = buckets[static_cast<std::size_t>(i)];
        for (Eigen::Index j = split; j < n; ++j) {
            const double c = cosine_from_norms(rows, i, j, norms[static_cast<std::size_t>(i)],
                                               norms[static_cast<std::size_t>(j)]);
            if (c > threshold) bucket.push_back(static_cast<std::uint32_t>(j));
        }
    }
    return flatten(buckets);
}

Matrix cosine_matrix(const Matrix& rows) {
    const auto norms = row_norms(rows);
    const auto n = rows.rows();
    Matrix out(n, n);
#pragma omp parallel for schedule(dynamic, 8)
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            const double c =
                cosine_from_norms(rows, i, j, norms[static_cast<std::size_t>(i)], norms[static_cast<std::size_t>(j)]);
            out(i, j) = c;
            out(j, i) = c;
        }
    }
    return out;
}

Matrix spmm(const CsrMatrix& a, const Matrix& dense) {
    if (a.cols != static_cast<std::size_t>(dense.rows())) throw DataError("spmm: shape mismatch");
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(a.rows), dense.cols());
    const auto rows = static_cast<Eigen::Index>(a.rows);
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < rows; ++i) {
        auto dst = out.row(i);
        const auto r = static_cast<std::size_t>(i);
        for (auto p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p) dst.noalias() += a.val[p] * dense.row(a.col[p]);
    }
    return out;
}

void nearest_centroid(const Matrix& points, const Matrix& centroids, std::vector<int>& assignment,
                      std::vector<double>& distance) {
    const auto n = points.rows();
    assignment.assign(static_cast<std::size_t>(n), 0);
    distance.assign(static_cast<std::size_t>(n), 0.0);
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        int best_k = 0;
        for (Eigen::Index k = 0; k < centroids.rows(); ++k) {
            const double d = (points.row(i) - centroids.row(k)).squaredNorm();
            if (d < best) {
                best = d;
                best_k = static_cast<int>(k);
            }
        }
        assignment[static_cast<std::size_t>(i)] = best_k;
        distance[static_cast<std::size_t>(i)] = best;
    }
}

} // namespace medplex::kernels::parallel
