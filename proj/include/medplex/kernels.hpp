#ifndef MEDPLEX_KERNELS_HPP
#define MEDPLEX_KERNELS_HPP

#include "medplex/common.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace medplex {

/// Compressed sparse rows. Column indices are sorted within each row.
struct CsrMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::size_t> row_ptr{0};
    std::vector<std::uint32_t> col;
    std::vector<double> val;

    std::size_t nnz() const { return val.size(); }
    Matrix to_dense() const;
};

using NodePair = std::pair<std::uint32_t, std::uint32_t>;

/// Hot loops of graph construction, propagation and clustering. `serial` is the
/// reference; `parallel` is the OpenMP build used by the library. Both produce
/// identical output for identical input, independent of thread count.
namespace kernels {

namespace serial {

/// Row norms, used to share work between cosine evaluations.
std::vector<double> row_norms(const Matrix& rows);

/// All pairs i < j whose row cosine similarity is strictly above `threshold`,
/// ordered by (i, j).
std::vector<NodePair> threshold_pairs(const Matrix& rows, double threshold);

/// Pairs (i, j) with i < `existing` <= j whose cosine exceeds `threshold`, ordered by (i, j).
std::vector<NodePair> threshold_pairs_bipartite(const Matrix& rows, std::size_t existing, double threshold);

/// Full n x n cosine matrix (diagonal included).
Matrix cosine_matrix(const Matrix& rows);

/// out = a * dense.
Matrix spmm(const CsrMatrix& a, const Matrix& dense);

/// Index of the nearest centroid (squared Euclidean) per point, lowest index on ties,
/// plus the squared distance to it.
void nearest_centroid(const Matrix& points, const Matrix& centroids, std::vector<int>& assignment,
                      std::vector<double>& distance);

} // namespace serial

namespace parallel {

std::vector<double> row_norms(const Matrix& rows);
std::vector<NodePair> threshold_pairs(const Matrix& rows, double threshold);
std::vector<NodePair> threshold_pairs_bipartite(const Matrix& rows, std::size_t existing, double threshold);
Matrix cosine_matrix(const Matrix& rows);
Matrix spmm(const CsrMatrix& a, const Matrix& dense);
void nearest_centroid(const Matrix& points, const Matrix& centroids, std::vector<int>& assignment,
                      std::vector<double>& distance);

} // namespace parallel

/// Sequential dot product. Fixed summation order keeps every cosine in the
/// library bit-identical to a straightforward loop.
inline double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += a[k] * b[k];
    return s;
}

/// Cosine of two rows given precomputed norms; 0 when either norm is 0.
inline double cosine_from_norms(const Matrix& rows, Eigen::Index i, Eigen::Index j, double norm_i,
                                double norm_j) {
    if (norm_i == 0.0 || norm_j == 0.0) return 0.0;
    const auto d = static_cast<std::size_t>(rows.cols());
    return dot(rows.data() + i * rows.cols(), rows.data() + j * rows.cols(), d) / (norm_i * norm_j);
}

} // namespace kernels
} // namespace medplex

#endif // MEDPLEX_KERNELS_HPP
