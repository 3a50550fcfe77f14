#include <benchmark/benchmark.h>

#include "multiway/special_functions.hpp"

namespace {

void BM_log_gamma(benchmark::State& state) {
  double x = 0.7;
  for (auto _ : state) {
    benchmark::DoNotOptimize(multiway::log_gamma(x));
    x += 0.1;
    if (x > 500.0) x = 0.7;
  }
}
BENCHMARK(BM_log_gamma);

void BM_f_sf(benchmark::State& state) {
  const int df1 = static_cast<int>(state.range(0));
  const int df2 = static_cast<int>(state.range(1));
  double f = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(multiway::f_sf(f, df1, df2));
    f += 0.13;
    if (f > 20.0) f = 0.01;
  }
}
BENCHMARK(BM_f_sf)->Args({1, 30})->Args({2, 30})->Args({7, 72})->Args({120, 120});

}  // namespace
