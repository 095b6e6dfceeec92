// Serial vs OpenMP sign kernels, naive vs merge-sort Kendall.
// Thread count comes from OMP_NUM_THREADS / the second range argument.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "qscorr/estimators.hpp"
#include "qscorr/kernels.hpp"

namespace {

std::vector<double> walk(std::size_t n, std::uint64_t seed, double mix = 0.0, const std::vector<double>* base = nullptr) {
    std::mt19937_64 g(seed);
    std::normal_distribution<double> z;
    std::vector<double> v(n);
    double level = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double step = z(g);
        if (base && i > 0) step = mix * ((*base)[i] - (*base)[i - 1]) + (1 - mix) * step;
        level += step;
        v[i] = level;
    }
    return v;
}

void BM_SignCountsSerial(benchmark::State& st) {
    const auto n = static_cast<std::size_t>(st.range(0));
    const auto x = walk(n, 1), y = walk(n, 2, 0.5, &x);
    for (auto _ : st) benchmark::DoNotOptimize(qsc::serial::sign_counts(x, y));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_SignCountsOmp(benchmark::State& st) {
    const auto n = static_cast<std::size_t>(st.range(0));
    qsc::set_thread_count(static_cast<int>(st.range(1)));
    const auto x = walk(n, 1), y = walk(n, 2, 0.5, &x);
    for (auto _ : st) benchmark::DoNotOptimize(qsc::omp::sign_counts(x, y));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_OverlappingSerial(benchmark::State& st) {
    const auto n = static_cast<std::size_t>(st.range(0));
    const auto x = walk(n + 1, 3), y = walk(n + 1, 4, 0.5, &x);
    for (auto _ : st) benchmark::DoNotOptimize(qsc::serial::overlapping_sign_counts(x, y, 180));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_OverlappingOmp(benchmark::State& st) {
    const auto n = static_cast<std::size_t>(st.range(0));
    qsc::set_thread_count(static_cast<int>(st.range(1)));
    const auto x = walk(n + 1, 3), y = walk(n + 1, 4, 0.5, &x);
    for (auto _ : st) benchmark::DoNotOptimize(qsc::omp::overlapping_sign_counts(x, y, 180));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_KendallNaive(benchmark::State& st) {
    const auto n = static_cast<std::size_t>(st.range(0));
    const auto x = walk(n, 5), y = walk(n, 6, 0.3, &x);
    for (auto _ : st) benchmark::DoNotOptimize(qsc::kendall_net_concordance_naive(x, y));
}

void BM_KendallMerge(benchmark::State& st) {
    const auto n = static_cast<std::size_t>(st.range(0));
    const auto x = walk(n, 5), y = walk(n, 6, 0.3, &x);
    for (auto _ : st) benchmark::DoNotOptimize(qsc::kendall_net_concordance(x, y));
}

}  // namespace

BENCHMARK(BM_SignCountsSerial)->Arg(23'400)->Arg(1 << 20);
BENCHMARK(BM_SignCountsOmp)->ArgsProduct({{23'400, 1 << 20}, {1, 2, 4}})->UseRealTime();
BENCHMARK(BM_OverlappingSerial)->Arg(23'400)->Arg(1 << 20);
BENCHMARK(BM_OverlappingOmp)->ArgsProduct({{23'400, 1 << 20}, {1, 2, 4}})->UseRealTime();
BENCHMARK(BM_KendallNaive)->RangeMultiplier(4)->Range(64, 4096);
BENCHMARK(BM_KendallMerge)->RangeMultiplier(4)->Range(64, 1 << 16);

BENCHMARK_MAIN();
