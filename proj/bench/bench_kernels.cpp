// Serial reference kernels vs their OpenMP versions.
//
//   DRIFT_THREADS=4 ./bench_kernels

#include <benchmark/benchmark.h>

#include "drifting/diagnostics.hpp"
#include "drifting/drift.hpp"
#include "drifting/metrics.hpp"
#include "drifting/numerics.hpp"
#include "drifting/parallel.hpp"

using namespace drifting;

namespace {

Matrix points(std::size_t n, std::size_t d, std::uint64_t seed) {
    Rng rng(seed);
    return draw_normal(rng, n, d);
}

void BM_PairwiseSerial(benchmark::State& st) {
    const auto n = static_cast<std::size_t>(st.range(0));
    const Matrix a = points(n, 2, 1), b = points(n, 2, 2);
    for (auto _ : st) benchmark::DoNotOptimize(serial::pairwise_l2(a, b));
}

void BM_PairwiseParallel(benchmark::State& st) {
    const auto n = static_cast<std::size_t>(st.range(0));
    const Matrix a = points(n, 2, 1), b = points(n, 2, 2);
    for (auto _ : st) benchmark::DoNotOptimize(pairwise_l2(a, b));
}

void BM_SoftmaxSerial(benchmark::State& st) {
    const auto n = static_cast<std::size_t>(st.range(0));
    const Matrix l = points(n, n, 3);
    for (auto _ : st) benchmark::DoNotOptimize(serial::masked_softmax(l, SoftmaxAxis::OverRows));
}

void BM_SoftmaxParallel(benchmark::State& st) {
    const auto n = static_cast<std::size_t>(st.range(0));
    const Matrix l = points(n, n, 3);
    for (auto _ : st) benchmark::DoNotOptimize(masked_softmax(l, SoftmaxAxis::OverRows));
}

void BM_EnergySerial(benchmark::State& st) {
    const auto n = static_cast<std::size_t>(st.range(0));
    const Matrix a = points(n, 2, 4), b = points(n, 2, 5);
    for (auto _ : st) benchmark::DoNotOptimize(serial::energy_distance(a, b));
}

void BM_EnergyParallel(benchmark::State& st) {
    const auto n = static_cast<std::size_t>(st.range(0));
    const Matrix a = points(n, 2, 4), b = points(n, 2, 5);
    for (auto _ : st) benchmark::DoNotOptimize(energy_distance(a, b));
}

void BM_DriftField(benchmark::State& st) {
    const auto n = static_cast<std::size_t>(st.range(0));
    const Matrix x = points(n, 2, 6), p = points(n, 2, 7), q = points(n, 2, 8);
    const DriftSpec spec;
    for (auto _ : st) benchmark::DoNotOptimize(compute_drift_raw(x, p, q, spec, 0.2));
}

void BM_DriftOracle(benchmark::State& st) {
    const auto n = static_cast<std::size_t>(st.range(0));
    const Matrix x = points(n, 2, 6), p = points(n, 2, 7), q = points(n, 2, 8);
    const DriftSpec spec;
    for (auto _ : st) benchmark::DoNotOptimize(oracle_drift(x, p, q, spec, 0.2));
}

}  // namespace

BENCHMARK(BM_PairwiseSerial)->Arg(256)->Arg(1024);
BENCHMARK(BM_PairwiseParallel)->Arg(256)->Arg(1024);
BENCHMARK(BM_SoftmaxSerial)->Arg(256)->Arg(1024);
BENCHMARK(BM_SoftmaxParallel)->Arg(256)->Arg(1024);
BENCHMARK(BM_EnergySerial)->Arg(1024)->Arg(2048);
BENCHMARK(BM_EnergyParallel)->Arg(1024)->Arg(2048);
BENCHMARK(BM_DriftField)->Arg(64)->Arg(96);
BENCHMARK(BM_DriftOracle)->Arg(64)->Arg(96);

int main(int argc, char** argv) {
    threads_from_env();
    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}
