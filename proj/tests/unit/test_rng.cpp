#include <doctest.h>

#include <cmath>

#include "multiway/rng.hpp"

using namespace multiway;

TEST_SUITE("rng") {

TEST_CASE("splitmix64 published test vector") {
  // First output of the reference SplitMix64 for seed 0.
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
}

TEST_CASE("xoshiro256++ output is pinned") {
  // Frozen against an independent implementation of the same seeding recipe;
  // simulation results are only reproducible if this stream never changes.
  Xoshiro256pp a(0);
  CHECK(a.next() == 0x53175d61490b23dfULL);
  CHECK(a.next() == 0x61da6f3dc380d507ULL);
  CHECK(a.next() == 0x5c0fdf91ec9a7bfcULL);
  CHECK(a.next() == 0x02eebf8c3bbe5e1aULL);

  Xoshiro256pp b(20260810);
  CHECK(b.next() == 0x00774f3832246465ULL);
  CHECK(b.next() == 0xb71b2a34bc576a88ULL);
}

TEST_CASE("replicate seeds are pinned and salt-separated") {
  CHECK(replicate_seed(42, 0) == 0x28efe333b266f103ULL);
  CHECK(replicate_seed(42, 1) == 0x47526757130f9f52ULL);
  CHECK(replicate_seed(42, 0, 1) != replicate_seed(42, 0));
  CHECK(replicate_seed(42, 0) != replicate_seed(43, 0));
}

TEST_CASE("polar-method normals are pinned") {
  NormalSampler sampler(7);
  CHECK(sampler.next() == 1.674036445441065);
  CHECK(sampler.next() == -0.560049561941806);
  CHECK(sampler.next() == 0.53789816819896552);
  CHECK(sampler.next() == -0.039787650024891603);
}

TEST_CASE("uniform01 stays in [0, 1) and fills the unit interval") {
  Xoshiro256pp rng(99);
  double lo = 1.0;
  double hi = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo < 1e-3);
  CHECK(hi > 1.0 - 1e-3);
}

TEST_CASE("normal moments are sane") {
  NormalSampler sampler(123);
  const int n = 200000;
  double sum = 0.0;
  double sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = sampler.next();
    sum += z;
    sumsq += z * z;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::fabs(mean) < 0.01);
  CHECK(std::fabs(var - 1.0) < 0.02);
  CHECK(sampler.next(10.0, 0.0) == 10.0);
}

}  // TEST_SUITE
