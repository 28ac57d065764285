#include "medplex/graph.hpp"
#include "medplex/kernels.hpp"
#include "medplex/model.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace medplex;

namespace {

Matrix random_rows(std::size_t n, std::size_t f, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> N(0.0, 1.0);
    Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(f));
    for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = N(rng);
    return m;
}

// Rows sized like a cohort: patients x one relation type's columns.
void BM_threshold_pairs_serial(benchmark::State& st) {
    const auto rows = random_rows(static_cast<std::size_t>(st.range(0)), 40, 1);
    for (auto _ : st) benchmark::DoNotOptimize(kernels::serial::threshold_pairs(rows, 0.1));
}

void BM_threshold_pairs_parallel(benchmark::State& st) {
    const auto rows = random_rows(static_cast<std::size_t>(st.range(0)), 40, 1);
    for (auto _ : st) benchmark::DoNotOptimize(kernels::parallel::threshold_pairs(rows, 0.1));
}

SparseOperator bench_operator(std::size_t n) {
    return normalize_adjacency(build_relation_graph(random_rows(n, 40, 2), 0.1));
}

void BM_spmm_serial(benchmark::State& st) {
    const auto n = static_cast<std::size_t>(st.range(0));
    const auto op = bench_operator(n);
    const auto x = random_rows(n, 400, 3);
    for (auto _ : st) benchmark::DoNotOptimize(kernels::serial::spmm(op, x));
}

void BM_spmm_parallel(benchmark::State& st) {
    const auto n = static_cast<std::size_t>(st.range(0));
    const auto op = bench_operator(n);
    const auto x = random_rows(n, 400, 3);
    for (auto _ : st) benchmark::DoNotOptimize(kernels::parallel::spmm(op, x));
}

// Clustering points are columns: one row per tabular column, one coordinate per patient.
void BM_nearest_centroid_serial(benchmark::State& st) {
    const auto points = random_rows(static_cast<std::size_t>(st.range(0)), 300, 4);
    const auto centroids = random_rows(8, 300, 5);
    std::vector<int> a;
    std::vector<double> d;
    for (auto _ : st) {
        kernels::serial::nearest_centroid(points, centroids, a, d);
        benchmark::DoNotOptimize(a.data());
    }
}

void BM_nearest_centroid_parallel(benchmark::State& st) {
    const auto points = random_rows(static_cast<std::size_t>(st.range(0)), 300, 4);
    const auto centroids = random_rows(8, 300, 5);
    std::vector<int> a;
    std::vector<double> d;
    for (auto _ : st) {
        kernels::parallel::nearest_centroid(points, centroids, a, d);
        benchmark::DoNotOptimize(a.data());
    }
}

} // namespace

BENCHMARK(BM_threshold_pairs_serial)->Arg(300)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_threshold_pairs_parallel)->Arg(300)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_spmm_serial)->Arg(300)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_spmm_parallel)->Arg(300)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_nearest_centroid_serial)->Arg(400)->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_nearest_centroid_parallel)->Arg(400)->Arg(4000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
