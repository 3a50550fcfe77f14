#include <benchmark/benchmark.h>

#include <vector>

#include "multiway/corrections.hpp"
#include "multiway/rng.hpp"

namespace {

using namespace multiway;

std::vector<double> random_pvalues(std::size_t m) {
  Xoshiro256pp rng(m);
  std::vector<double> p(m);
  for (double& v : p) v = rng.uniform01();
  return p;
}

void BM_holm_kernel(benchmark::State& state) {
  const auto p = random_pvalues(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernel::reject_holm(p, 0.05));
  }
}
BENCHMARK(BM_holm_kernel)->Arg(3)->Arg(7)->Arg(63);

void BM_bh_kernel(benchmark::State& state) {
  const auto p = random_pvalues(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernel::reject_bh(p, 0.05));
  }
}
BENCHMARK(BM_bh_kernel)->Arg(3)->Arg(7)->Arg(63);

void BM_adjusted_pvalues(benchmark::State& state) {
  const auto p = random_pvalues(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernel::adjusted(Method::bh, p));
  }
}
BENCHMARK(BM_adjusted_pvalues)->Arg(7)->Arg(63);

}  // namespace
