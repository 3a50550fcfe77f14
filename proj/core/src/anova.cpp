#include "multiway/anova.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

#include "multiway/special_functions.hpp"

namespace multiway {

namespace {

// Neumaier-compensated accumulator; keeps the SS decomposition tight on
// large N.
struct CompSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double v) {
    const double t = sum + v;
    if (std::fabs(sum) >= std::fabs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }

  double value() const { return sum + comp; }
};

int checked_df(std::int64_t df) {
  if (df < 1 || df > std::numeric_limits<int>::max()) {
    throw validation_error("degrees of freedom out of range: " + std::to_string(df));
  }
  return static_cast<int>(df);
}

// Marginal means of the cell-mean tensor over the factors in `mask`
// (averaging out everything else). The output tensor is indexed row-major
// over the mask's factors in ascending index order, last one fastest.
// mask == 0 yields the grand mean as a single element.
std::vector<double> marginal_means(const Design& design, std::span<const double> means,
                                   std::uint32_t mask) {
  const int k = design.factor_count();
  std::int64_t out_size = 1;
  for (int j = 0; j < k; ++j) {
    if ((mask >> j) & 1u) out_size *= design.levels(j);
  }
  std::vector<CompSum> acc(static_cast<std::size_t>(out_size));

  std::vector<int> coord(static_cast<std::size_t>(k), 0);
  const std::int64_t cells = design.cell_count();
  for (std::int64_t c = 0; c < cells; ++c) {
    std::int64_t out_idx = 0;
    for (int j = 0; j < k; ++j) {
      if ((mask >> j) & 1u) out_idx = out_idx * design.levels(j) + coord[j];
    }
    acc[static_cast<std::size_t>(out_idx)].add(means[static_cast<std::size_t>(c)]);
    for (int j = k - 1; j >= 0; --j) {
      if (++coord[j] < design.levels(j)) break;
      coord[j] = 0;
    }
  }

  const double scale = static_cast<double>(cells / out_size);
  std::vector<double> out(static_cast<std::size_t>(out_size));
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = acc[i].value() / scale;
  }
  return out;
}

void check_effect_in_design(const Design& design, EffectId effect) {
  if (effect.max_member() >= design.factor_count()) {
    throw validation_error("effect references factor index " +
                           std::to_string(effect.max_member()) + " but the design has " +
                           std::to_string(design.factor_count()) + " factors");
  }
}

}  // namespace

Dataset::Dataset(Design design, std::vector<double> responses, int)
    : design_(std::move(design)), responses_(std::move(responses)) {}

Dataset::Dataset(Design design, std::span<const Observation> observations)
    : design_(std::move(design)) {
  const int k = design_.factor_count();
  const int n = design_.n_per_cell();
  const std::int64_t cells = design_.cell_count();

  std::vector<int> counts(static_cast<std::size_t>(cells), 0);
  responses_.assign(static_cast<std::size_t>(design_.total_n()), 0.0);

  for (std::size_t r = 0; r < observations.size(); ++r) {
    const Observation& obs = observations[r];
    if (static_cast<int>(obs.cell.size()) != k) {
      throw validation_error("observation " + std::to_string(r) + " has " +
                             std::to_string(obs.cell.size()) + " level indices, expected " +
                             std::to_string(k));
    }
    for (int j = 0; j < k; ++j) {
      if (obs.cell[static_cast<std::size_t>(j)] < 0 ||
          obs.cell[static_cast<std::size_t>(j)] >= design_.levels(j)) {
        throw validation_error("observation " + std::to_string(r) + ": level index " +
                               std::to_string(obs.cell[static_cast<std::size_t>(j)]) +
                               " out of range for factor '" + design_.factor(j).name + "'");
      }
    }
    const std::int64_t c = design_.cell_index(obs.cell);
    if (counts[static_cast<std::size_t>(c)] >= n) {
      ++counts[static_cast<std::size_t>(c)];  // keep counting for the error message
      continue;
    }
    responses_[static_cast<std::size_t>(c * n + counts[static_cast<std::size_t>(c)])] = obs.y;
    ++counts[static_cast<std::size_t>(c)];
  }

  std::ostringstream bad;
  int bad_cells = 0;
  for (std::int64_t c = 0; c < cells; ++c) {
    if (counts[static_cast<std::size_t>(c)] == n) continue;
    if (bad_cells < 5) {
      bad << (bad_cells ? ", " : "") << "cell " << c << " has "
          << counts[static_cast<std::size_t>(c)] << " observations";
    }
    ++bad_cells;
  }
  if (bad_cells > 0) {
    throw validation_error("unbalanced design: expected " + std::to_string(n) +
                           " observations per cell; " + bad.str() +
                           (bad_cells > 5 ? ", ..." : ""));
  }
}

Dataset Dataset::from_cell_major(Design design, std::vector<double> responses) {
  if (static_cast<std::int64_t>(responses.size()) != design.total_n()) {
    throw validation_error("expected " + std::to_string(design.total_n()) +
                           " responses, got " + std::to_string(responses.size()));
  }
  return Dataset(std::move(design), std::move(responses), 0);
}

std::span<const double> Dataset::cell_responses(std::int64_t cell) const {
  const int n = design_.n_per_cell();
  return std::span<const double>(responses_).subspan(static_cast<std::size_t>(cell * n),
                                                     static_cast<std::size_t>(n));
}

std::vector<double> cell_means(const Dataset& dataset) {
  const Design& d = dataset.design();
  const int n = d.n_per_cell();
  const std::int64_t cells = d.cell_count();
  const std::vector<double>& y = dataset.responses();

  std::vector<double> means(static_cast<std::size_t>(cells));
  for (std::int64_t c = 0; c < cells; ++c) {
    CompSum s;
    for (int i = 0; i < n; ++i) {
      s.add(y[static_cast<std::size_t>(c * n + i)]);
    }
    means[static_cast<std::size_t>(c)] = s.value() / n;
  }
  return means;
}

std::vector<double> effect_contrasts(const Design& design, std::span<const double> means,
                                     EffectId effect) {
  check_effect_in_design(design, effect);
  const std::vector<int> members = effect.members();
  std::int64_t out_size = 1;
  for (int j : members) out_size *= design.levels(j);

  std::vector<double> out(static_cast<std::size_t>(out_size), 0.0);

  // Alternating sum over subsets of the effect, enumerated by the
  // (sub - 1) & mask walk (descending, deterministic).
  std::uint32_t sub = effect.mask();
  while (true) {
    const std::vector<double> marg = marginal_means(design, means, sub);
    const int omitted = effect.order() - std::popcount(sub);
    const double sign = (omitted % 2 == 0) ? 1.0 : -1.0;

    // Walk the output tensor and pick the matching entry of the marginal.
    std::vector<int> coord(members.size(), 0);
    for (std::size_t s = 0; s < out.size(); ++s) {
      std::int64_t idx = 0;
      for (std::size_t t = 0; t < members.size(); ++t) {
        if ((sub >> members[t]) & 1u) idx = idx * design.levels(members[t]) + coord[t];
      }
      out[s] += sign * marg[static_cast<std::size_t>(idx)];
      for (int t = static_cast<int>(members.size()) - 1; t >= 0; --t) {
        if (++coord[static_cast<std::size_t>(t)] < design.levels(members[static_cast<std::size_t>(t)])) break;
        coord[static_cast<std::size_t>(t)] = 0;
      }
    }
    if (sub == 0) break;
    sub = (sub - 1) & effect.mask();
  }
  return out;
}

namespace {

double contrast_ss(const Design& design, std::span<const double> means, EffectId effect) {
  const std::vector<double> tau = effect_contrasts(design, means, effect);
  CompSum sq;
  for (double t : tau) sq.add(t * t);
  const double excluded = static_cast<double>(design.cell_count() /
                                              static_cast<std::int64_t>(tau.size()));
  return design.n_per_cell() * excluded * sq.value();
}

}  // namespace

double effect_ss(const Dataset& dataset, EffectId effect) {
  return contrast_ss(dataset.design(), cell_means(dataset), effect);
}

AnovaTable anova_table(const Design& design, std::span<const double> y,
                       std::span<const EffectId> family) {
  if (family.empty()) {
    throw validation_error("family must contain at least one effect");
  }
  if (static_cast<std::int64_t>(y.size()) != design.total_n()) {
    throw validation_error("expected " + std::to_string(design.total_n()) + " responses, got " +
                           std::to_string(y.size()));
  }
  for (EffectId e : family) check_effect_in_design(design, e);

  const int n = design.n_per_cell();
  const std::int64_t cells = design.cell_count();

  std::vector<double> means(static_cast<std::size_t>(cells));
  CompSum grand_acc;
  for (std::int64_t c = 0; c < cells; ++c) {
    CompSum s;
    for (int i = 0; i < n; ++i) s.add(y[static_cast<std::size_t>(c * n + i)]);
    means[static_cast<std::size_t>(c)] = s.value() / n;
    grand_acc.add(s.value());
  }
  const double grand = grand_acc.value() / static_cast<double>(design.total_n());

  CompSum error_acc;
  CompSum total_acc;
  for (std::int64_t c = 0; c < cells; ++c) {
    const double m = means[static_cast<std::size_t>(c)];
    for (int i = 0; i < n; ++i) {
      const double v = y[static_cast<std::size_t>(c * n + i)];
      const double e = v - m;
      error_acc.add(e * e);
      const double t = v - grand;
      total_acc.add(t * t);
    }
  }

  AnovaTable table;
  table.factor_count = design.factor_count();
  table.error_ss = error_acc.value();
  table.error_df = design.total_n() - cells;
  table.total_ss = total_acc.value();
  table.grand_mean = grand;
  if (table.error_ss == 0.0) {
    throw numeric_error("zero within-cell variance: F statistics are undefined");
  }
  table.mse = table.error_ss / static_cast<double>(table.error_df);

  const int err_df = checked_df(table.error_df);
  table.rows.reserve(family.size());
  for (EffectId e : family) {
    const double ss = contrast_ss(design, means, e);
    std::int64_t df = 1;
    for (int j : e.members()) df *= design.levels(j) - 1;
    const double ms = ss / static_cast<double>(df);
    const double f = ms / table.mse;
    table.rows.push_back({e, ss, df, ms, f, f_sf(f, checked_df(df), err_df)});
  }
  return table;
}

AnovaTable anova_table(const Dataset& dataset, std::span<const EffectId> family) {
  return anova_table(dataset.design(), dataset.responses(), family);
}

OmnibusF omnibus_f(const AnovaTable& table) {
  const std::uint32_t all = (1u << table.factor_count) - 1;
  std::uint32_t seen = 0;
  for (const AnovaRow& row : table.rows) seen |= row.effect.mask();
  if (table.rows.size() != static_cast<std::size_t>(all) || seen != all) {
    throw validation_error("omnibus F requires the full family of " + std::to_string(all) +
                           " effects, got " + std::to_string(table.rows.size()) + " rows");
  }

  CompSum ss;
  std::int64_t df1 = 0;
  for (const AnovaRow& row : table.rows) {
    ss.add(row.ss);
    df1 += row.df;
  }
  OmnibusF out;
  out.f = (ss.value() / static_cast<double>(df1)) / table.mse;
  out.df1 = df1;
  out.df2 = table.error_df;
  out.p = f_sf(out.f, checked_df(df1), checked_df(table.error_df));
  return out;
}

}  // namespace multiway
