#include <benchmark/benchmark.h>

#include "deam/binomial.hpp"

using namespace deam;

static void BM_TreeValue(benchmark::State& state) {
    const OptionSpec put(OptionType::put, Exercise::american, 1.0, 1.0);
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(tree_value(put, 1.0, 0.05, 1.003, n, 1.0 / static_cast<double>(n)));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_TreeValue)->RangeMultiplier(2)->Range(500, 8000)->Complexity(benchmark::oNSquared);

static void BM_Deamericanize(benchmark::State& state) {
    const Quote q(OptionSpec(OptionType::put, Exercise::american, 1.0, 1.0), 0.09);
    TreeConfig cfg;
    cfg.dt = 1.0 / static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(deamericanize(q, 1.0, 0.05, cfg));
}
BENCHMARK(BM_Deamericanize)->Arg(500)->Arg(5000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
