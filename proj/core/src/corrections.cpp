#include "multiway/corrections.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace multiway {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw validation_error("alpha must lie strictly between 0 and 1");
  }
}

// Stable ascending order by p; ties keep input order.
std::vector<std::size_t> ascending_order(std::span<const double> p) {
  std::vector<std::size_t> order(p.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  return order;
}

double alpha_adjusted(Method method, int rank, std::size_t m, double alpha) {
  switch (method) {
    case Method::bonferroni:
      return alpha / static_cast<double>(m);
    case Method::holm:
      return alpha / static_cast<double>(m - static_cast<std::size_t>(rank) + 1);
    case Method::bh:
      return alpha * static_cast<double>(rank) / static_cast<double>(m);
    case Method::none:
    case Method::omnibus_gate:
      return alpha;
  }
  return alpha;
}

DecisionTable build_table(Method method, const PValueVector& pv, double alpha) {
  check_alpha(alpha);
  DecisionTable table;
  table.method = method;
  table.alpha = alpha;
  if (pv.empty()) return table;

  const std::size_t m = pv.size();
  std::vector<double> p(m);
  for (std::size_t i = 0; i < m; ++i) p[i] = pv.entries()[i].p;

  std::vector<std::uint8_t> flags;
  switch (method) {
    case Method::none: flags = kernel::reject_none(p, alpha); break;
    case Method::bonferroni: flags = kernel::reject_bonferroni(p, alpha); break;
    case Method::holm: flags = kernel::reject_holm(p, alpha); break;
    case Method::bh: flags = kernel::reject_bh(p, alpha); break;
    case Method::omnibus_gate:
      throw validation_error("omnibus gate needs an ANOVA table, not a p-value vector");
  }

  std::vector<double> p_adj;
  if (method == Method::bonferroni || method == Method::holm || method == Method::bh) {
    p_adj = kernel::adjusted(method, p);
  } else {
    p_adj = p;
  }

  const std::vector<std::size_t> order = ascending_order(p);
  table.rows.reserve(m);
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t i = order[r];
    DecisionRow row;
    row.label = pv.entries()[i].label;
    row.p = p[i];
    row.rank = static_cast<int>(r) + 1;
    row.alpha_adj = alpha_adjusted(method, row.rank, m, alpha);
    row.p_adj = p_adj[i];
    row.decision = flags[i] ? Decision::rejected : Decision::retained;
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace

std::string_view method_name(Method method) {
  switch (method) {
    case Method::none: return "none";
    case Method::bonferroni: return "bonferroni";
    case Method::holm: return "holm";
    case Method::bh: return "bh";
    case Method::omnibus_gate: return "omnibus";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  if (name == "none") return Method::none;
  if (name == "bonferroni") return Method::bonferroni;
  if (name == "holm") return Method::holm;
  if (name == "bh") return Method::bh;
  if (name == "omnibus") return Method::omnibus_gate;
  throw validation_error("unknown method '" + std::string(name) +
                         "' (expected none|bonferroni|holm|bh|omnibus)");
}

PValueVector::PValueVector(std::vector<PEntry> entries) : entries_(std::move(entries)) {
  std::set<std::string> seen;
  for (const PEntry& e : entries_) {
    if (e.label.empty()) {
      throw validation_error("p-value label must be nonempty");
    }
    if (!seen.insert(e.label).second) {
      throw validation_error("duplicate p-value label '" + e.label + "'");
    }
    if (!(e.p >= 0.0) || !(e.p <= 1.0)) {
      throw validation_error("p-value for '" + e.label + "' must lie in [0, 1], got " +
                             std::to_string(e.p));
    }
  }
}

std::vector<std::string> DecisionTable::rejected_labels() const {
  std::vector<std::string> out;
  for (const DecisionRow& row : rows) {
    if (row.decision == Decision::rejected) out.push_back(row.label);
  }
  return out;
}

DecisionTable uncorrected_decisions(const PValueVector& pv, double alpha) {
  return build_table(Method::none, pv, alpha);
}

DecisionTable bonferroni_decisions(const PValueVector& pv, double alpha) {
  return build_table(Method::bonferroni, pv, alpha);
}

DecisionTable holm_decisions(const PValueVector& pv, double alpha) {
  return build_table(Method::holm, pv, alpha);
}

DecisionTable bh_decisions(const PValueVector& pv, double alpha) {
  return build_table(Method::bh, pv, alpha);
}

DecisionTable omnibus_gate(const Design& design, const AnovaTable& table, double alpha) {
  check_alpha(alpha);
  const OmnibusF omn = omnibus_f(table);

  std::vector<PEntry> entries;
  entries.reserve(table.rows.size());
  std::vector<double> p(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    entries.push_back({effect_label(design, table.rows[i].effect), table.rows[i].p});
    p[i] = table.rows[i].p;
  }

  DecisionTable out = build_table(Method::none, PValueVector(std::move(entries)), alpha);
  out.method = Method::omnibus_gate;
  const bool open = rejects(omn.p, alpha);
  if (!open) {
    for (DecisionRow& row : out.rows) row.decision = Decision::retained;
  }
  out.gate = GateInfo{omn.f, omn.df1, omn.df2, omn.p, open};
  return out;
}

std::vector<std::pair<std::string, double>> adjusted_pvalues(Method method,
                                                             const PValueVector& pv) {
  if (method != Method::bonferroni && method != Method::holm && method != Method::bh) {
    throw validation_error("adjusted p-values are defined for bonferroni, holm, and bh only");
  }
  std::vector<double> p(pv.size());
  for (std::size_t i = 0; i < pv.size(); ++i) p[i] = pv.entries()[i].p;
  const std::vector<double> adj = kernel::adjusted(method, p);
  std::vector<std::pair<std::string, double>> out;
  out.reserve(pv.size());
  for (std::size_t i = 0; i < pv.size(); ++i) {
    out.emplace_back(pv.entries()[i].label, adj[i]);
  }
  return out;
}

namespace kernel {

std::vector<std::uint8_t> reject_none(std::span<const double> p, double alpha) {
  std::vector<std::uint8_t> out(p.size(), 0);
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = rejects(p[i], alpha) ? 1 : 0;
  return out;
}

std::vector<std::uint8_t> reject_bonferroni(std::span<const double> p, double alpha) {
  const double threshold = alpha / static_cast<double>(p.size());
  std::vector<std::uint8_t> out(p.size(), 0);
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = rejects(p[i], threshold) ? 1 : 0;
  return out;
}

std::vector<std::uint8_t> reject_holm(std::span<const double> p, double alpha) {
  const std::size_t m = p.size();
  std::vector<std::uint8_t> out(m, 0);
  const std::vector<std::size_t> order = ascending_order(p);
  // Step down from the smallest p; the first non-rejection ends testing.
  for (std::size_t r = 0; r < m; ++r) {
    const double threshold = alpha / static_cast<double>(m - r);
    if (!rejects(p[order[r]], threshold)) break;
    out[order[r]] = 1;
  }
  return out;
}

std::vector<std::uint8_t> reject_bh(std::span<const double> p, double alpha) {
  const std::size_t m = p.size();
  std::vector<std::uint8_t> out(m, 0);
  const std::vector<std::size_t> order = ascending_order(p);
  // Step up from the largest p; the first rejection takes every smaller rank
  // with it.
  for (std::size_t r = m; r-- > 0;) {
    const double threshold = alpha * static_cast<double>(r + 1) / static_cast<double>(m);
    if (rejects(p[order[r]], threshold)) {
      for (std::size_t s = 0; s <= r; ++s) out[order[s]] = 1;
      break;
    }
  }
  return out;
}

std::vector<double> adjusted(Method method, std::span<const double> p) {
  const std::size_t m = p.size();
  std::vector<double> out(m, 0.0);
  if (m == 0) return out;
  const std::vector<std::size_t> order = ascending_order(p);

  switch (method) {
    case Method::bonferroni:
      for (std::size_t i = 0; i < m; ++i) {
        out[i] = std::min(1.0, static_cast<double>(m) * p[i]);
      }
      break;
    case Method::holm: {
      double running = 0.0;
      for (std::size_t r = 0; r < m; ++r) {
        const double v = std::min(1.0, static_cast<double>(m - r) * p[order[r]]);
        running = std::max(running, v);
        out[order[r]] = running;
      }
      break;
    }
    case Method::bh: {
      double running = 1.0;
      for (std::size_t r = m; r-- > 0;) {
        const double v =
            std::min(1.0, static_cast<double>(m) / static_cast<double>(r + 1) * p[order[r]]);
        running = std::min(running, v);
        out[order[r]] = running;
      }
      break;
    }
    default:
      throw validation_error("adjusted p-values are defined for bonferroni, holm, and bh only");
  }
  return out;
}

}  // namespace kernel

}  // namespace multiway
