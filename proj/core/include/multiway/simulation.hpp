#pragma once

#include <cstdint>
#include <vector>

#include "multiway/corrections.hpp"
#include "multiway/design.hpp"

namespace multiway {

/// Monte Carlo scenario: true cell means define which effects are genuinely
/// present; responses are drawn normal(cell mean, sigma). The seed is part of
/// the scenario identity -- results are a pure function of this struct,
/// independent of how many workers execute the replicates.
struct SimConfig {
  Design design;
  std::vector<double> cell_means;  // flattened cell-major, size == cell_count
  double sigma = 1.0;
  double alpha = 0.05;
  std::vector<Method> methods;
  std::uint64_t replications = 0;
  std::uint64_t seed = 0;

  /// All-null scenario (every cell mean zero).
  static SimConfig all_null(Design design, double sigma, double alpha,
                            std::vector<Method> methods, std::uint64_t replications,
                            std::uint64_t seed);
};

void validate(const SimConfig& config);

struct EffectPartition {
  std::vector<EffectId> null_effects;
  std::vector<EffectId> nonnull_effects;
};

/// Partition of the full family by whether the population contrasts of the
/// cell-mean pattern vanish (tolerance 1e-12 on the largest contrast).
EffectPartition classify_true_effects(const SimConfig& config);

/// Outcome of one replicate: reject flags per requested method, aligned with
/// the full family in enumeration order. `redrawn` records that the first
/// draw produced degenerate data and the rescue stream was used.
struct ReplicateOutcome {
  std::vector<std::vector<std::uint8_t>> rejected;  // [method][effect]
  bool redrawn = false;
};

/// Runs one replicate: draws n_per_cell responses per cell from a generator
/// seeded deterministically by (config.seed, replicate_index), computes the
/// full ANOVA table, and applies every requested method. A degenerate draw
/// (zero within-cell variance) is redrawn once from a salted stream; a second
/// failure aborts.
ReplicateOutcome run_replicate(const SimConfig& config, std::uint64_t replicate_index);

/// Exact integer tallies for one method. Merging tallies is integer
/// addition, so aggregation order (and therefore worker count) cannot change
/// the result.
struct MethodTally {
  std::uint64_t any_false_rejection = 0;
  /// Histogram over (V, R) = (false rejections, total rejections) per
  /// replicate, stored dense as vr_counts[V * (m+1) + R] with m = family size.
  std::vector<std::uint64_t> vr_counts;
  std::vector<std::uint64_t> effect_rejections;  // per family effect

  void merge(const MethodTally& other);
};

struct MethodResult {
  Method method = Method::none;
  MethodTally tally;
  double fwer_hat = 0.0;  // share of replicates with >= 1 false rejection
  double fwer_se = 0.0;   // sqrt(fwer_hat * (1 - fwer_hat) / replications)
  double fdr_hat = 0.0;   // mean of V / max(R, 1)
  /// Rejection proportion per family effect; for truly non-null effects this
  /// is the power estimate.
  std::vector<double> effect_rejection_rate;
};

struct SimResult {
  std::vector<EffectId> family;  // full family, enumeration order
  EffectPartition truth;
  std::vector<MethodResult> methods;  // order matches config.methods
  std::uint64_t replications = 0;
  std::uint64_t seed = 0;
  std::uint64_t redraws = 0;
};

/// Aggregates run_replicate over all replications. `workers` <= 0 picks the
/// hardware concurrency; any worker count yields a bitwise-identical
/// SimResult.
SimResult simulate(const SimConfig& config, int workers = 0);

}  // namespace multiway
