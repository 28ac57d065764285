#ifndef MEDPLEX_TEST_SUPPORT_HPP
#define MEDPLEX_TEST_SUPPORT_HPP

#include "medplex/common.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>

namespace testing {

using medplex::Matrix;
using medplex::Vector;

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> N(0.0, scale);
    Matrix m(rows, cols);
    for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = N(rng);
    return m;
}

/// Largest relative error between `analytic` and central differences of `f` over the
/// `n` entries of `x`. The denominator is floored at 1e-6 so near-zero gradients compare
/// absolutely.
inline double max_fd_error(double* x, std::size_t n, const double* analytic, const std::function<double()>& f,
                           double eps = 1e-5) {
    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double saved = x[k];
        x[k] = saved + eps;
        const double up = f();
        x[k] = saved - eps;
        const double down = f();
        x[k] = saved;
        const double numeric = (up - down) / (2.0 * eps);
        const double denom = std::max({std::abs(numeric), std::abs(analytic[k]), 1e-6});
        worst = std::max(worst, std::abs(numeric - analytic[k]) / denom);
    }
    return worst;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
    const auto p = std::filesystem::temp_directory_path() / ("medplex_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

inline std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace testing

#endif // MEDPLEX_TEST_SUPPORT_HPP
