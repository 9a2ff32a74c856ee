#include <benchmark/benchmark.h>

#include "deam/pde/solver.hpp"

using namespace deam;

static void BM_AmericanPut(benchmark::State& state) {
    const auto model = static_cast<ModelKind>(state.range(0));
    const auto p = scenario_params(model, 2);
    const auto grid = pde::GridSpec::defaults(model);
    const OptionSpec put(OptionType::put, Exercise::american, 1.0, 1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(pde::solve_american(p, put, 0.07, grid, pde::default_lcp(model)).price_at(1.0));
    }
    state.SetLabel(std::string(to_string(model)));
}
BENCHMARK(BM_AmericanPut)
    ->Arg(static_cast<int>(ModelKind::cev))
    ->Arg(static_cast<int>(ModelKind::heston))
    ->Arg(static_cast<int>(ModelKind::merton))
    ->Unit(benchmark::kMillisecond);

static void BM_EuropeanPut(benchmark::State& state) {
    const auto model = static_cast<ModelKind>(state.range(0));
    const auto p = scenario_params(model, 2);
    const auto grid = pde::GridSpec::defaults(model);
    const OptionSpec put(OptionType::put, Exercise::european, 1.0, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(pde::solve_european(p, put, 0.07, grid).price_at(1.0));
    state.SetLabel(std::string(to_string(model)));
}
BENCHMARK(BM_EuropeanPut)
    ->Arg(static_cast<int>(ModelKind::cev))
    ->Arg(static_cast<int>(ModelKind::heston))
    ->Arg(static_cast<int>(ModelKind::merton))
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
