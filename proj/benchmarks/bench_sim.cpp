#include <benchmark/benchmark.h>

#include "airan/experiment.hpp"

using namespace airan;

// End-to-end run of the default preset under a policy that needs no critic.
static void BM_PresetRun(benchmark::State& state) {
  auto cfg = default_config();
  cfg.workload.horizon = static_cast<double>(state.range(0));
  const auto wl = prepare_workload(cfg, 1);
  for (auto _ : state) benchmark::DoNotOptimize(run_policy(cfg, PolicyKind::HafNoCritic, 1, wl, {}));
}
BENCHMARK(BM_PresetRun)->Arg(60)->Arg(300)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
