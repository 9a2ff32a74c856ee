#include <benchmark/benchmark.h>

#include "deam/mc_exotics.hpp"

using namespace deam;

static void BM_SimulateAndPrice(benchmark::State& state) {
    const auto model = static_cast<ModelKind>(state.range(0));
    const auto p = scenario_params(model, 2);
    McConfig cfg;
    cfg.n_paths = 100'000;
    const auto doc = ExoticSpec::standard(ExoticKind::down_and_out_call);
    const auto lb = ExoticSpec::standard(ExoticKind::lookback_call);
    for (auto _ : state) {
        const auto paths = simulate_paths(p, 1.0, 0.07, 1.0, cfg);
        benchmark::DoNotOptimize(price_exotic(paths, doc).price + price_exotic(paths, lb).price);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.n_paths));
    state.SetLabel(std::string(to_string(model)));
}
BENCHMARK(BM_SimulateAndPrice)
    ->Arg(static_cast<int>(ModelKind::cev))
    ->Arg(static_cast<int>(ModelKind::heston))
    ->Arg(static_cast<int>(ModelKind::merton))
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
