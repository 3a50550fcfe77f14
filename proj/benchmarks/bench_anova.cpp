#include <benchmark/benchmark.h>

#include <vector>

#include "multiway/anova.hpp"
#include "multiway/rng.hpp"

namespace {

using namespace multiway;

Design bench_design(int variant, int n) {
  switch (variant) {
    case 0: return Design({{"A", 2}, {"B", 3}}, n);
    case 1: return Design({{"A", 2}, {"B", 2}, {"C", 2}}, n);
    default: return Design({{"A", 3}, {"B", 4}, {"C", 2}, {"D", 3}}, n);
  }
}

void BM_anova_table(benchmark::State& state) {
  const Design design = bench_design(static_cast<int>(state.range(0)),
                                     static_cast<int>(state.range(1)));
  NormalSampler normals(1234);
  std::vector<double> y(static_cast<std::size_t>(design.total_n()));
  for (double& v : y) v = normals.next();
  const auto family = enumerate_effects(design);

  for (auto _ : state) {
    benchmark::DoNotOptimize(anova_table(design, y, family));
  }
  state.SetItemsProcessed(state.iterations() * design.total_n());
}
BENCHMARK(BM_anova_table)->Args({0, 6})->Args({0, 100})->Args({1, 10})->Args({2, 5});

void BM_effect_ss(benchmark::State& state) {
  const Design design = bench_design(2, 5);
  NormalSampler normals(99);
  std::vector<double> y(static_cast<std::size_t>(design.total_n()));
  for (double& v : y) v = normals.next();
  const Dataset data = Dataset::from_cell_major(design, y);
  const auto family = enumerate_effects(design);
  const EffectId effect = family[family.size() - 1];  // highest-order interaction

  for (auto _ : state) {
    benchmark::DoNotOptimize(effect_ss(data, effect));
  }
}
BENCHMARK(BM_effect_ss);

}  // namespace
