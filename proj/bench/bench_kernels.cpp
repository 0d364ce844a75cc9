// Serial reference vs OpenMP for the three parallel kernels.
// Range argument 0 selects the serial backend, 1 the OpenMP one.

#include <benchmark/benchmark.h>

#include "typek/hypothesis.hpp"
#include "typek/orbit.hpp"

using namespace typek;

namespace {

Backend backend(const benchmark::State& state) { return state.range(0) ? Backend::openmp : Backend::serial; }

void BM_RhoScan(benchmark::State& state) {
    const auto map = builtin_example1(1.0, 0.05);
    const auto grid = static_cast<std::size_t>(state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(check_rho_M(map, grid, {}, backend(state)).max_rho);
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid * grid));
}

void BM_Retrotone(benchmark::State& state) {
    const auto map = builtin_example1(1.0, 0.05);
    const auto pairs = static_cast<std::size_t>(state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(sample_retrotone(map, pairs, 1, true, backend(state)).filtered);
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pairs));
}

void BM_OrbitBatch(benchmark::State& state) {
    const auto map = builtin_example1(0.75, 0.05);
    std::vector<Vec> starts;
    const auto n = static_cast<std::size_t>(state.range(1));
    for (std::size_t i = 0; i < n; ++i) {
        const double t = (i + 0.5) / n;
        starts.push_back(Vec{0.05 + 1.9 * t, 1.95 - 1.9 * t});
    }
    for (auto _ : state) benchmark::DoNotOptimize(iterate_batch(map, starts, {}, backend(state)).size());
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

}  // namespace

BENCHMARK(BM_RhoScan)->ArgsProduct({{0, 1}, {65, 257}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Retrotone)->ArgsProduct({{0, 1}, {100000}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OrbitBatch)->ArgsProduct({{0, 1}, {64}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
