#include <benchmark/benchmark.h>

#include "molres/readout.hpp"
#include "molres/rng.hpp"

namespace {

Eigen::MatrixXd random_rows(long n, long d, std::uint64_t seed) {
    molres::Rng rng(seed);
    Eigen::MatrixXd m(n, d);
    for (long r = 0; r < n; ++r)
        for (long c = 0; c < d; ++c) m(r, c) = rng.uniform();
    return m;
}

void BM_FitPca(benchmark::State& state) {
    const auto rows = random_rows(state.range(0), state.range(1), 3);
    for (auto _ : state) {
        auto p = molres::fit_pca(rows, 0.95);
        benchmark::DoNotOptimize(p.n_components);
    }
}

void BM_FitRidge(benchmark::State& state) {
    const auto x = random_rows(state.range(0), state.range(1), 5);
    Eigen::VectorXd y = x.col(0) - 0.5 * x.col(1);
    for (auto _ : state) {
        auto m = molres::fit_ridge(x, y, 1e-3);
        benchmark::DoNotOptimize(m.bias);
    }
}

} // namespace

BENCHMARK(BM_FitPca)->Args({200, 3000})->Args({200, 9000});
BENCHMARK(BM_FitRidge)->Args({200, 100})->Args({200, 200});
