#include "medplex/kernels.hpp"

#include <cmath>
#include <limits>

namespace medplex {

Matrix CsrMatrix::to_dense() const {
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        for (auto p = row_ptr[i]; p < row_ptr[i + 1]; ++p) out(static_cast<Eigen::Index>(i), col[p]) = val[p];
    }
    return out;
}

namespace kernels::serial {

std::vector<double> row_norms(const Matrix& rows) {
    const auto d = static_cast<std::size_t>(rows.cols());
    std::vector<double> norms(static_cast<std::size_t>(rows.rows()));
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        const double* r = rows.data() + i * rows.cols();
        norms[static_cast<std::size_t>(i)] = std::sqrt(dot(r, r, d));
    }
    return norms;
}

std::vector<NodePair> threshold_pairs(const Matrix& rows, double threshold) {
    const auto norms = row_norms(rows);
    std::vector<NodePair> out;
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < rows.rows(); ++j) {
            const double c = cosine_from_norms(rows, i, j, norms[static_cast<std::size_t>(i)],
                                               norms[static_cast<std::size_t>(j)]);
            if (c > threshold) out.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
        }
    }
    return out;
}

std::vector<NodePair> threshold_pairs_bipartite(const Matrix& rows, std::size_t existing, double threshold) {
    const auto norms = row_norms(rows);
    std::vector<NodePair> out;
    const auto split = static_cast<Eigen::Index>(existing);
    for (Eigen::Index i = 0; i < split; ++i) {
        for (Eigen::Index j = split; j < rows.rows(); ++j) {
            const double c = cosine_from_norms(rows, i, j, norms[static_cast<std::size_t>(i)],
                                               norms[static_cast<std::size_t>(j)]);
            if (c > threshold) out.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
        }
    }
    return out;
}

Matrix cosine_matrix(const Matrix& rows) {
    const auto norms = row_norms(rows);
    const auto n = rows.rows();
    Matrix out(n, n);
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
    for (std::size_t i = 0; i < a.rows; ++i) {
        auto dst = out.row(static_cast<Eigen::Index>(i));
        for (auto p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) dst.noalias() += a.val[p] * dense.row(a.col[p]);
    }
    return out;
}

void nearest_centroid(const Matrix& points, const Matrix& centroids, std::vector<int>& assignment,
                      std::vector<double>& distance) {
    const auto n = static_cast<std::size_t>(points.rows());
    assignment.assign(n, 0);
    distance.assign(n, 0.0);
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
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

} // namespace kernels::serial
} // namespace medplex
