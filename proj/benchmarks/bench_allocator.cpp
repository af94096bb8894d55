#include <benchmark/benchmark.h>

#include <random>

#include "airan/allocator.hpp"

using namespace airan;

namespace {

std::vector<ResourceDemand> random_demands(std::size_t n, double capacity, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<ResourceDemand> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    d[i].instance_id = static_cast<InstanceId>(i);
    d[i].weight = std::pow(10.0, 6.0 * u(rng));
    d[i].floor = u(rng) < 0.3 ? 0.5 * capacity / static_cast<double>(n) * u(rng) : 0.0;
  }
  return d;
}

void BM_SolveResource(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto d = random_demands(n, 1e14, 7);
  for (auto _ : state) benchmark::DoNotOptimize(solve_resource(d, 1e14));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_SolveResource)->RangeMultiplier(2)->Range(2, 64);

void BM_AllocateNode(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  NodeState node{0, 1e14, 64.0, 10.0, {}};
  for (std::size_t i = 0; i < n; ++i) {
    NodeInstanceState inst;
    inst.instance_id = static_cast<InstanceId>(i);
    inst.category = i % 4 == 0 ? Category::DU : i % 4 == 1 ? Category::CU_UP : Category::SMALL_AI;
    inst.downstream_est = 1e-5;
    for (int k = 0; k < 8; ++k) {
      const bool ran = inst.category != Category::SMALL_AI;
      inst.work.push_back({static_cast<RequestId>(i * 8 + k), 10.0 - 1e-4 * u(rng), ran ? 4e-3 : 0.5,
                           inst.category == Category::CU_UP ? 0.0 : 1e9 * (1.0 + u(rng)),
                           inst.category == Category::CU_UP ? 1e-5 * (1.0 + u(rng)) : 0.0});
    }
    node.instances.push_back(std::move(inst));
  }
  const AllocatorConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(allocate_node(node, cfg));
}
BENCHMARK(BM_AllocateNode)->Arg(4)->Arg(8)->Arg(16);

}  // namespace
