#include "multiway/design.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <sstream>

namespace multiway {

Design::Design(std::vector<Factor> factors, int n_per_cell)
    : factors_(std::move(factors)), n_per_cell_(n_per_cell) {
  if (factors_.empty()) {
    throw validation_error("design needs at least one factor");
  }
  if (factors_.size() > EffectId::kMaxFactors) {
    throw validation_error("design has more than " + std::to_string(EffectId::kMaxFactors) +
                           " factors");
  }
  std::set<std::string> seen;
  std::int64_t cells = 1;
  for (const Factor& f : factors_) {
    if (f.name.empty()) {
      throw validation_error("factor name must be nonempty");
    }
    if (!seen.insert(f.name).second) {
      throw validation_error("duplicate factor name '" + f.name + "'");
    }
    if (f.levels < 2) {
      throw validation_error("factor '" + f.name + "' needs at least 2 levels, got " +
                             std::to_string(f.levels));
    }
    cells *= f.levels;
    if (cells > (std::int64_t{1} << 31)) {
      throw validation_error("design has too many cells");
    }
  }
  if (n_per_cell_ < 2) {
    throw validation_error("n_per_cell must be at least 2, got " + std::to_string(n_per_cell_));
  }
  cell_count_ = cells;
}

int Design::factor_index(std::string_view name) const {
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (factors_[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

std::int64_t Design::cell_index(std::span<const int> levels) const {
  std::int64_t idx = 0;
  for (std::size_t j = 0; j < factors_.size(); ++j) {
    idx = idx * factors_[j].levels + levels[j];
  }
  return idx;
}

EffectId EffectId::from_members(std::span<const int> members) {
  if (members.empty()) {
    throw validation_error("effect needs at least one factor");
  }
  std::uint32_t mask = 0;
  for (int m : members) {
    if (m < 0 || m >= kMaxFactors) {
      throw validation_error("factor index " + std::to_string(m) + " out of range");
    }
    if ((mask >> m) & 1u) {
      throw validation_error("repeated factor index " + std::to_string(m) + " in effect");
    }
    mask |= 1u << m;
  }
  return EffectId(mask);
}

EffectId EffectId::from_mask(std::uint32_t mask) {
  if (mask == 0) {
    throw validation_error("effect needs at least one factor");
  }
  if (mask >= (1u << kMaxFactors)) {
    throw validation_error("effect mask out of range");
  }
  return EffectId(mask);
}

int EffectId::order() const { return std::popcount(mask_); }

std::vector<int> EffectId::members() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(order()));
  for (int i = 0; i < kMaxFactors; ++i) {
    if (contains(i)) out.push_back(i);
  }
  return out;
}

int EffectId::max_member() const { return std::bit_width(mask_) - 1; }

bool effect_less(EffectId a, EffectId b) {
  if (a.order() != b.order()) return a.order() < b.order();
  // Same order: lexicographic on ascending member indices. Peel the lowest
  // set bit of each mask until they differ.
  std::uint32_t ma = a.mask();
  std::uint32_t mb = b.mask();
  while (ma != 0 && mb != 0) {
    const int la = std::countr_zero(ma);
    const int lb = std::countr_zero(mb);
    if (la != lb) return la < lb;
    ma &= ma - 1;
    mb &= mb - 1;
  }
  return false;
}

std::string effect_label(const Design& design, EffectId effect) {
  if (effect.max_member() >= design.factor_count()) {
    throw validation_error("effect references a factor outside the design");
  }
  std::string out;
  for (int m : effect.members()) {
    if (!out.empty()) out += 'x';
    out += design.factor(m).name;
  }
  return out;
}

EffectId parse_effect_label(const Design& design, std::string_view label) {
  std::vector<int> members;
  std::size_t start = 0;
  while (start <= label.size()) {
    const std::size_t sep = label.find('x', start);
    const std::string_view name =
        label.substr(start, sep == std::string_view::npos ? label.size() - start : sep - start);
    if (name.empty()) {
      throw validation_error("malformed effect label '" + std::string(label) + "'");
    }
    const int idx = design.factor_index(name);
    if (idx < 0) {
      throw validation_error("unknown factor '" + std::string(name) + "' in effect label '" +
                             std::string(label) + "'");
    }
    members.push_back(idx);
    if (sep == std::string_view::npos) break;
    start = sep + 1;
  }
  return EffectId::from_members(members);
}

FamilySpec FamilySpec::preregistered(std::vector<EffectId> effects) {
  if (effects.empty()) {
    throw validation_error("preregistered family must declare at least one effect");
  }
  return FamilySpec{FamilyMode::preregistered, std::move(effects)};
}

std::vector<EffectId> enumerate_effects(const Design& design) {
  const int k = design.factor_count();
  const std::uint32_t all = (1u << k) - 1;
  std::vector<EffectId> effects;
  effects.reserve(all);
  for (std::uint32_t mask = 1; mask <= all; ++mask) {
    effects.push_back(EffectId::from_mask(mask));
  }
  std::sort(effects.begin(), effects.end(), effect_less);
  return effects;
}

std::vector<EffectId> resolve_family(const Design& design, const FamilySpec& spec) {
  const std::vector<EffectId> all = enumerate_effects(design);
  if (spec.mode == FamilyMode::exploratory) {
    if (!spec.declared.empty()) {
      throw validation_error("exploratory family must not declare effects");
    }
    return all;
  }
  if (spec.declared.empty()) {
    throw validation_error("preregistered family must declare at least one effect");
  }
  std::set<std::uint32_t> declared;
  for (EffectId e : spec.declared) {
    if (e.max_member() >= design.factor_count()) {
      throw validation_error("declared effect references factor index " +
                             std::to_string(e.max_member()) + " but the design has only " +
                             std::to_string(design.factor_count()) + " factors");
    }
    declared.insert(e.mask());
  }
  std::vector<EffectId> family;
  family.reserve(declared.size());
  for (EffectId e : all) {
    if (declared.contains(e.mask())) family.push_back(e);
  }
  return family;
}

double independence_bound(int m, double alpha) {
  if (m < 1) {
    throw validation_error("test count must be at least 1, got " + std::to_string(m));
  }
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw validation_error("alpha must lie strictly between 0 and 1");
  }
  // 1 - (1 - alpha)^1 is exactly alpha; returning it directly avoids the
  // 1-(1-a) rounding detour.
  if (m == 1) return alpha;
  // Iterated multiplication instead of pow(): deterministic across libms.
  const double q = 1.0 - alpha;
  double qm = 1.0;
  for (int i = 0; i < m; ++i) qm *= q;
  return 1.0 - qm;
}

}  // namespace multiway
