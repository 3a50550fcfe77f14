#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "multiway/anova.hpp"
#include "multiway/errors.hpp"

namespace multiway {

enum class Method { none, bonferroni, holm, bh, omnibus_gate };

std::string_view method_name(Method method);
/// Parses "none", "bonferroni", "holm", "bh", "omnibus". Throws
/// validation_error for anything else.
Method parse_method(std::string_view name);

struct PEntry {
  std::string label;
  double p = 0.0;
};

/// Labeled p-values. Construction validates every p in [0, 1] and that
/// labels are nonempty and unique.
class PValueVector {
public:
  PValueVector() = default;
  explicit PValueVector(std::vector<PEntry> entries);

  const std::vector<PEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

private:
  std::vector<PEntry> entries_;
};

enum class Decision { rejected, retained };

struct DecisionRow {
  std::string label;
  double p = 0.0;
  int rank = 0;  // 1-based rank under ascending p, ties broken by input order
  double alpha_adj = 0.0;
  double p_adj = 0.0;
  Decision decision = Decision::retained;
};

struct GateInfo {
  double f = 0.0;
  std::int64_t df1 = 0;
  std::int64_t df2 = 0;
  double p = 1.0;
  bool open = false;
};

struct DecisionTable {
  Method method = Method::none;
  double alpha = 0.05;
  std::vector<DecisionRow> rows;  // in rank order (ascending p)
  std::optional<GateInfo> gate;   // present iff method == omnibus_gate

  /// Labels of rejected hypotheses, in rank order.
  std::vector<std::string> rejected_labels() const;
};

/// The one rejection convention used by every procedure here: reject iff
/// p is strictly smaller than the adjusted alpha. Boundary cases p == alpha_adj
/// are retained.
constexpr bool rejects(double p, double alpha_adj) { return p < alpha_adj; }

/// Each test at the unadjusted level alpha.
DecisionTable uncorrected_decisions(const PValueVector& pv, double alpha);

/// Every test at alpha / m.
DecisionTable bonferroni_decisions(const PValueVector& pv, double alpha);

/// Step-down sequential Bonferroni: ascending scan, threshold alpha/(m-i+1)
/// at rank i; the first non-rejection ends testing and retains everything
/// after it.
DecisionTable holm_decisions(const PValueVector& pv, double alpha);

/// Step-up Benjamini-Hochberg: descending scan, threshold alpha*i/m at rank
/// i; the first rejection rejects that rank and every smaller rank.
DecisionTable bh_decisions(const PValueVector& pv, double alpha);

/// Omnibus-F gate: when the pooled F is not significant at alpha the gate is
/// closed and every effect is retained; otherwise each effect is tested
/// uncorrected at alpha. Requires a full-family AnovaTable; the design
/// supplies the effect labels. The gate statistic is recorded in the result.
DecisionTable omnibus_gate(const Design& design, const AnovaTable& table, double alpha);

/// Adjusted p-values in input order, clamped to 1:
///   bonferroni: m*p
///   holm:       running max over ascending ranks of (m-i+1)*p
///   bh:         running min over descending ranks of (m/i)*p
/// Comparing p_adj < alpha reproduces the corresponding decision procedure.
/// Only bonferroni, holm, and bh are valid here.
std::vector<std::pair<std::string, double>> adjusted_pvalues(Method method,
                                                             const PValueVector& pv);

namespace kernel {

/// Unlabeled rejection kernels used by both the decision tables and the
/// Monte Carlo simulator. Each returns reject flags aligned with the input
/// order.
std::vector<std::uint8_t> reject_none(std::span<const double> p, double alpha);
std::vector<std::uint8_t> reject_bonferroni(std::span<const double> p, double alpha);
std::vector<std::uint8_t> reject_holm(std::span<const double> p, double alpha);
std::vector<std::uint8_t> reject_bh(std::span<const double> p, double alpha);

/// Adjusted p-values aligned with the input order (method as documented
/// above).
std::vector<double> adjusted(Method method, std::span<const double> p);

}  // namespace kernel

}  // namespace multiway
