#include "multiway/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "multiway/anova.hpp"
#include "multiway/rng.hpp"

namespace multiway {

namespace {

constexpr double kTruthTolerance = 1e-12;

std::vector<double> draw_responses(const SimConfig& config, std::uint64_t seed) {
  const std::int64_t cells = config.design.cell_count();
  const int n = config.design.n_per_cell();
  NormalSampler sampler(seed);
  std::vector<double> y(static_cast<std::size_t>(config.design.total_n()));
  for (std::int64_t c = 0; c < cells; ++c) {
    const double mean = config.cell_means[static_cast<std::size_t>(c)];
    for (int i = 0; i < n; ++i) {
      y[static_cast<std::size_t>(c * n + i)] = sampler.next(mean, config.sigma);
    }
  }
  return y;
}

struct Tallies {
  std::vector<MethodTally> per_method;
  std::uint64_t redraws = 0;

  Tallies(std::size_t methods, std::size_t family_size) {
    per_method.resize(methods);
    for (MethodTally& t : per_method) {
      t.vr_counts.assign((family_size + 1) * (family_size + 1), 0);
      t.effect_rejections.assign(family_size, 0);
    }
  }

  void merge(const Tallies& other) {
    for (std::size_t i = 0; i < per_method.size(); ++i) {
      per_method[i].merge(other.per_method[i]);
    }
    redraws += other.redraws;
  }
};

void tally_outcome(const ReplicateOutcome& outcome, std::span<const std::uint8_t> is_null,
                   Tallies& tallies) {
  const std::size_t m = is_null.size();
  for (std::size_t mi = 0; mi < outcome.rejected.size(); ++mi) {
    const std::vector<std::uint8_t>& flags = outcome.rejected[mi];
    MethodTally& tally = tallies.per_method[mi];
    std::size_t v = 0;
    std::size_t r = 0;
    for (std::size_t e = 0; e < m; ++e) {
      if (!flags[e]) continue;
      ++r;
      if (is_null[e]) ++v;
      ++tally.effect_rejections[e];
    }
    if (v > 0) ++tally.any_false_rejection;
    ++tally.vr_counts[v * (m + 1) + r];
  }
  if (outcome.redrawn) ++tallies.redraws;
}

}  // namespace

SimConfig SimConfig::all_null(Design design, double sigma, double alpha,
                              std::vector<Method> methods, std::uint64_t replications,
                              std::uint64_t seed) {
  const auto cells = static_cast<std::size_t>(design.cell_count());
  return SimConfig{std::move(design), std::vector<double>(cells, 0.0),
                   sigma,             alpha,
                   std::move(methods), replications,
                   seed};
}

void validate(const SimConfig& config) {
  if (static_cast<std::int64_t>(config.cell_means.size()) != config.design.cell_count()) {
    throw validation_error("cell_means has " + std::to_string(config.cell_means.size()) +
                           " entries, design has " + std::to_string(config.design.cell_count()) +
                           " cells");
  }
  if (!(config.sigma > 0.0)) {
    throw validation_error("sigma must be positive");
  }
  if (!(config.alpha > 0.0) || !(config.alpha < 1.0)) {
    throw validation_error("alpha must lie strictly between 0 and 1");
  }
  if (config.methods.empty()) {
    throw validation_error("at least one method is required");
  }
  if (config.replications < 1) {
    throw validation_error("replications must be at least 1");
  }
}

EffectPartition classify_true_effects(const SimConfig& config) {
  validate(config);
  EffectPartition out;
  for (EffectId effect : enumerate_effects(config.design)) {
    const std::vector<double> tau =
        effect_contrasts(config.design, config.cell_means, effect);
    double max_abs = 0.0;
    for (double t : tau) max_abs = std::max(max_abs, std::fabs(t));
    if (max_abs <= kTruthTolerance) {
      out.null_effects.push_back(effect);
    } else {
      out.nonnull_effects.push_back(effect);
    }
  }
  return out;
}

ReplicateOutcome run_replicate(const SimConfig& config, std::uint64_t replicate_index) {
  const std::vector<EffectId> family = enumerate_effects(config.design);

  AnovaTable table;
  bool redrawn = false;
  try {
    table = anova_table(config.design, draw_responses(config, replicate_seed(config.seed, replicate_index)),
                        family);
  } catch (const numeric_error&) {
    redrawn = true;
    table = anova_table(config.design,
                        draw_responses(config, replicate_seed(config.seed, replicate_index, 1)),
                        family);
  }

  std::vector<double> p(table.rows.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = table.rows[i].p;

  ReplicateOutcome outcome;
  outcome.redrawn = redrawn;
  outcome.rejected.reserve(config.methods.size());
  for (Method method : config.methods) {
    switch (method) {
      case Method::none:
        outcome.rejected.push_back(kernel::reject_none(p, config.alpha));
        break;
      case Method::bonferroni:
        outcome.rejected.push_back(kernel::reject_bonferroni(p, config.alpha));
        break;
      case Method::holm:
        outcome.rejected.push_back(kernel::reject_holm(p, config.alpha));
        break;
      case Method::bh:
        outcome.rejected.push_back(kernel::reject_bh(p, config.alpha));
        break;
      case Method::omnibus_gate: {
        const OmnibusF omn = omnibus_f(table);
        if (rejects(omn.p, config.alpha)) {
          outcome.rejected.push_back(kernel::reject_none(p, config.alpha));
        } else {
          outcome.rejected.push_back(std::vector<std::uint8_t>(p.size(), 0));
        }
        break;
      }
    }
  }
  return outcome;
}

void MethodTally::merge(const MethodTally& other) {
  any_false_rejection += other.any_false_rejection;
  for (std::size_t i = 0; i < vr_counts.size(); ++i) vr_counts[i] += other.vr_counts[i];
  for (std::size_t i = 0; i < effect_rejections.size(); ++i) {
    effect_rejections[i] += other.effect_rejections[i];
  }
}

SimResult simulate(const SimConfig& config, int workers) {
  validate(config);

  SimResult result;
  result.family = enumerate_effects(config.design);
  result.truth = classify_true_effects(config);
  result.replications = config.replications;
  result.seed = config.seed;

  const std::size_t m = result.family.size();
  std::vector<std::uint8_t> is_null(m, 0);
  for (std::size_t e = 0; e < m; ++e) {
    for (EffectId nul : result.truth.null_effects) {
      if (nul == result.family[e]) {
        is_null[e] = 1;
        break;
      }
    }
  }

  if (workers <= 0) {
    workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
  }
  const std::uint64_t reps = config.replications;
  workers = static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(workers), reps));

  auto run_range = [&](std::uint64_t begin, std::uint64_t end, Tallies& tallies) {
    for (std::uint64_t r = begin; r < end; ++r) {
      tally_outcome(run_replicate(config, r), is_null, tallies);
    }
  };

  Tallies total(config.methods.size(), m);
  if (workers == 1) {
    run_range(0, reps, total);
  } else {
    std::vector<Tallies> partial(static_cast<std::size_t>(workers), Tallies(config.methods.size(), m));
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(workers));
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const std::uint64_t chunk = (reps + static_cast<std::uint64_t>(workers) - 1) /
                                static_cast<std::uint64_t>(workers);
    for (int w = 0; w < workers; ++w) {
      const std::uint64_t begin = static_cast<std::uint64_t>(w) * chunk;
      const std::uint64_t end = std::min(reps, begin + chunk);
      threads.emplace_back([&, begin, end, w] {
        try {
          run_range(begin, end, partial[static_cast<std::size_t>(w)]);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
    for (std::thread& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);
    // Merge in worker order; all tallies are integers, so any order gives
    // the same totals.
    for (const Tallies& t : partial) total.merge(t);
  }

  result.redraws = total.redraws;
  const double n_reps = static_cast<double>(reps);
  for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
    MethodResult mr;
    mr.method = config.methods[mi];
    mr.tally = std::move(total.per_method[mi]);
    mr.fwer_hat = static_cast<double>(mr.tally.any_false_rejection) / n_reps;
    mr.fwer_se = std::sqrt(mr.fwer_hat * (1.0 - mr.fwer_hat) / n_reps);

    // FDR from the exact (V, R) histogram, summed in a fixed order.
    double fdr_sum = 0.0;
    for (std::size_t v = 0; v <= m; ++v) {
      for (std::size_t r = 0; r <= m; ++r) {
        const std::uint64_t count = mr.tally.vr_counts[v * (m + 1) + r];
        if (count == 0 || v == 0) continue;
        fdr_sum += static_cast<double>(count) * (static_cast<double>(v) /
                                                 static_cast<double>(std::max<std::size_t>(r, 1)));
      }
    }
    mr.fdr_hat = fdr_sum / n_reps;

    mr.effect_rejection_rate.resize(m);
    for (std::size_t e = 0; e < m; ++e) {
      mr.effect_rejection_rate[e] = static_cast<double>(mr.tally.effect_rejections[e]) / n_reps;
    }
    result.methods.push_back(std::move(mr));
  }
  return result;
}

}  // namespace multiway
