#pragma once

#include <cstdint>

namespace multiway {

/// SplitMix64 avalanche step (Steele, Lea & Flood 2014). Bijective on 64-bit
/// words; used for stream derivation and for seeding the main generator.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// xoshiro256++ (Blackman & Vigna 2019), state filled from a SplitMix64
/// stream per the authors' seeding recipe. Fixed algorithm so results are
/// bit-reproducible across platforms and standard libraries.
class Xoshiro256pp {
public:
  explicit Xoshiro256pp(std::uint64_t seed);

  std::uint64_t next();

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
  std::uint64_t s_[4];
};

/// Standard normal variates via the Marsaglia polar method over
/// Xoshiro256pp. The spare variate is cached, so draw order is part of the
/// reproducibility contract.
class NormalSampler {
public:
  explicit NormalSampler(std::uint64_t seed) : rng_(seed) {}

  double next();

  /// mean + sd * standard normal.
  double next(double mean, double sd) { return mean + sd * next(); }

private:
  Xoshiro256pp rng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Seed for one replicate's generator: a SplitMix64 stream is started at
/// master + (index+1) * golden-gamma, giving well-separated streams that are
/// independent of which worker executes the replicate. `salt` selects the
/// rescue stream used when a replicate must be redrawn.
constexpr std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t index,
                                       std::uint64_t salt = 0) {
  return splitmix64(master + (index + 1) * 0x9e3779b97f4a7c15ULL +
                    salt * 0xd1b54a32d192ed03ULL);
}

}  // namespace multiway
