#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "multiway/errors.hpp"

namespace multiway {

struct Factor {
  std::string name;
  int levels = 0;
};

/// A balanced crossed factorial design: an ordered list of factors with their
/// level counts, plus the per-cell replicate count. Immutable after
/// construction; construction validates all invariants (every level count
/// >= 2, n_per_cell >= 2 so the error degrees of freedom stay positive).
class Design {
public:
  Design(std::vector<Factor> factors, int n_per_cell);

  int factor_count() const { return static_cast<int>(factors_.size()); }
  const std::vector<Factor>& factors() const { return factors_; }
  const Factor& factor(int i) const { return factors_.at(static_cast<std::size_t>(i)); }
  int levels(int i) const { return factors_.at(static_cast<std::size_t>(i)).levels; }
  int n_per_cell() const { return n_per_cell_; }

  /// Product of all level counts.
  std::int64_t cell_count() const { return cell_count_; }
  /// n_per_cell * cell_count.
  std::int64_t total_n() const { return cell_count_ * n_per_cell_; }

  /// Index of the factor with the given name, or -1 if absent.
  /// Names are matched case-sensitively.
  int factor_index(std::string_view name) const;

  /// Flattened cell index for per-factor level indices (last factor varies
  /// fastest). Levels must already be range-checked by the caller.
  std::int64_t cell_index(std::span<const int> levels) const;

  friend bool operator==(const Design&, const Design&) = default;

private:
  std::vector<Factor> factors_;
  int n_per_cell_ = 0;
  std::int64_t cell_count_ = 0;
};

/// A nonempty subset of factor indices: order 1 is a main effect, order 2 a
/// first-order interaction, and so on. Stored as a bitmask over factor
/// indices, so designs are limited to 20 factors (already far beyond any
/// dataset that fits in memory).
class EffectId {
public:
  static constexpr int kMaxFactors = 20;

  static EffectId from_members(std::span<const int> members);
  static EffectId from_mask(std::uint32_t mask);

  std::uint32_t mask() const { return mask_; }
  int order() const;
  bool contains(int factor) const { return (mask_ >> factor) & 1u; }
  /// Ascending factor indices.
  std::vector<int> members() const;
  int max_member() const;

  friend bool operator==(EffectId, EffectId) = default;

private:
  explicit EffectId(std::uint32_t mask) : mask_(mask) {}
  std::uint32_t mask_ = 0;
};

/// Enumeration order: ascending effect order (main effects first), then
/// lexicographically ascending member indices within an order.
bool effect_less(EffectId a, EffectId b);

/// Factor names joined by "x", e.g. "GxE". Inverse of parse_effect_label.
std::string effect_label(const Design& design, EffectId effect);

/// Parses a label like "GxE" (names case-sensitive, order-insensitive).
/// Throws validation_error for unknown or repeated factor names.
EffectId parse_effect_label(const Design& design, std::string_view label);

enum class FamilyMode { exploratory, preregistered };

/// Which hypotheses are under joint test. Exploratory means every effect the
/// design can express; preregistered restricts the family to the declared
/// effects.
struct FamilySpec {
  FamilyMode mode = FamilyMode::exploratory;
  std::vector<EffectId> declared;  // empty iff exploratory

  static FamilySpec exploratory() { return {}; }
  static FamilySpec preregistered(std::vector<EffectId> effects);
};

/// All 2^k - 1 effects of the design, in enumeration order.
std::vector<EffectId> enumerate_effects(const Design& design);

/// The tested family: all effects when exploratory, otherwise the declared
/// subset in enumeration order. The family size m is the returned length.
std::vector<EffectId> resolve_family(const Design& design, const FamilySpec& spec);

/// Probability of at least one rejection among m independent level-alpha
/// tests under the global null: 1 - (1 - alpha)^m.
double independence_bound(int m, double alpha);

}  // namespace multiway
