#include <benchmark/benchmark.h>

#include "multiway/simulation.hpp"

namespace {

using namespace multiway;

void BM_replicate(benchmark::State& state) {
  const SimConfig config = SimConfig::all_null(
      Design({{"G", 2}, {"E", 3}}, static_cast<int>(state.range(0))), 1.0, 0.05,
      {Method::none, Method::bonferroni, Method::holm, Method::bh, Method::omnibus_gate}, 1, 42);
  std::uint64_t index = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_replicate(config, index++));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_replicate)->Arg(6)->Arg(100);

void BM_simulate_10k(benchmark::State& state) {
  const SimConfig config = SimConfig::all_null(Design({{"G", 2}, {"E", 3}}, 6), 1.0, 0.05,
                                               {Method::none, Method::holm, Method::bh}, 10000,
                                               42);
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate(config, 1));
  }
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_simulate_10k)->Unit(benchmark::kMillisecond);

}  // namespace
