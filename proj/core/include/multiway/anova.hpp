#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "multiway/design.hpp"

namespace multiway {

/// One row of input data: per-factor level indices plus the response.
struct Observation {
  std::vector<int> cell;
  double y = 0.0;
};

/// A balanced factorial dataset. Observations are stored cell-major: cell c
/// (flattened index) occupies responses[c*n .. (c+1)*n). Construction from an
/// observation list validates level ranges and enforces exact balance.
class Dataset {
public:
  Dataset(Design design, std::span<const Observation> observations);

  /// Fast path for generated data already grouped by cell. responses.size()
  /// must equal cell_count() * n_per_cell.
  static Dataset from_cell_major(Design design, std::vector<double> responses);

  const Design& design() const { return design_; }
  const std::vector<double>& responses() const { return responses_; }
  std::span<const double> cell_responses(std::int64_t cell) const;

private:
  Dataset(Design design, std::vector<double> responses, int);
  Design design_;
  std::vector<double> responses_;
};

struct AnovaRow {
  EffectId effect;
  double ss = 0.0;
  std::int64_t df = 0;
  double ms = 0.0;
  double f = 0.0;
  double p = 1.0;
};

struct AnovaTable {
  std::vector<AnovaRow> rows;  // family effects, in the family's order
  double error_ss = 0.0;
  std::int64_t error_df = 0;
  double mse = 0.0;
  double total_ss = 0.0;
  double grand_mean = 0.0;
  int factor_count = 0;  // k of the originating design
};

struct OmnibusF {
  double f = 0.0;
  std::int64_t df1 = 0;
  std::int64_t df2 = 0;
  double p = 1.0;
};

/// Per-cell arithmetic means, flattened cell-major.
std::vector<double> cell_means(const Dataset& dataset);

/// Inclusion-exclusion contrasts of an effect given the full cell-mean
/// tensor: for effect U, the value at each combination of U's levels is the
/// alternating sum of marginal means over subsets of U (for U = {A,B}:
/// cell mean - A marginal - B marginal + grand mean). Returned in row-major
/// order over U's levels. These vanish exactly when the effect is absent
/// from the population means.
std::vector<double> effect_contrasts(const Design& design,
                                     std::span<const double> cell_means,
                                     EffectId effect);

/// Balanced-design sum of squares for one effect:
/// n_per_cell * (product of excluded level counts) * sum of squared contrasts.
double effect_ss(const Dataset& dataset, EffectId effect);

/// Full ANOVA table for the given family. Sums of squares are computed for
/// ALL 2^k - 1 effects so the error SS and totals do not depend on the family;
/// only family effects are reported as rows. Throws numeric_error when the
/// within-cell variance is zero (F undefined).
AnovaTable anova_table(const Dataset& dataset, std::span<const EffectId> family);

/// As above but over raw cell-major responses; the Dataset overload and the
/// simulator both call this.
AnovaTable anova_table(const Design& design, std::span<const double> cell_major_responses,
                       std::span<const EffectId> family);

/// Pooled F over all effects: (sum SS / sum df) / MSE with df1 = product of
/// level counts - 1 and df2 = error df. Requires a full-family table.
OmnibusF omnibus_f(const AnovaTable& table);

}  // namespace multiway
