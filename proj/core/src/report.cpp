#include "multiway/report.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace multiway {

namespace {

using nlohmann::json;

std::string fmt(const char* format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, value);
  return buf;
}

std::string sig6(double value) { return fmt("%.6g", value); }
std::string full(double value) { return fmt("%.17g", value); }

std::string pad(std::string s, std::size_t width, bool right = true) {
  if (s.size() >= width) return s;
  const std::string fill(width - s.size(), ' ');
  return right ? fill + s : s + fill;
}

std::string decision_name(Decision d) {
  return d == Decision::rejected ? "rejected" : "retained";
}

std::string design_summary(const Design& design) {
  std::string s;
  for (int j = 0; j < design.factor_count(); ++j) {
    if (j) s += "x";
    s += std::to_string(design.levels(j));
  }
  s += " (";
  for (int j = 0; j < design.factor_count(); ++j) {
    if (j) s += ", ";
    s += design.factor(j).name;
  }
  s += "), n per cell = " + std::to_string(design.n_per_cell());
  return s;
}

// ---- text ----

void render_anova_text(const Report& report, std::ostream& out) {
  const AnovaTable& t = *report.anova;
  out << "ANOVA: design " << design_summary(*report.design) << ", N = "
      << report.design->total_n() << "\n\n";
  out << pad("effect", 12, false) << pad("SS", 12) << pad("df", 6) << pad("MS", 12)
      << pad("F", 10) << pad("p-value", 10) << "\n";
  for (const AnovaRow& row : t.rows) {
    out << pad(effect_label(*report.design, row.effect), 12, false) << pad(sig6(row.ss), 12)
        << pad(std::to_string(row.df), 6) << pad(sig6(row.ms), 12) << pad(sig6(row.f), 10)
        << pad(format_pvalue(row.p), 10) << "\n";
  }
  out << pad("error", 12, false) << pad(sig6(t.error_ss), 12) << pad(std::to_string(t.error_df), 6)
      << pad(sig6(t.mse), 12) << "\n";
  out << pad("total", 12, false) << pad(sig6(t.total_ss), 12) << "\n";
  if (report.omnibus) {
    out << "\nomnibus F = " << sig6(report.omnibus->f) << " (df " << report.omnibus->df1 << ", "
        << report.omnibus->df2 << "), p = " << format_pvalue(report.omnibus->p) << "\n";
  }
}

void render_decisions_text(const DecisionTable& table, std::ostream& out) {
  out << "\ndecisions: " << method_name(table.method) << " (alpha = " << sig6(table.alpha)
      << ")\n";
  if (table.gate) {
    out << "gate: F = " << sig6(table.gate->f) << " (df " << table.gate->df1 << ", "
        << table.gate->df2 << "), p = " << format_pvalue(table.gate->p) << ", "
        << (table.gate->open ? "open" : "closed") << "\n";
  }
  out << pad("rank", 5, false) << pad("effect", 12, false) << pad("p-value", 10)
      << pad("alpha_adj", 11) << pad("p_adj", 10) << pad("decision", 10) << "\n";
  for (const DecisionRow& row : table.rows) {
    out << pad(std::to_string(row.rank), 5, false) << pad(row.label, 12, false)
        << pad(format_pvalue(row.p), 10) << pad(format_pvalue(row.alpha_adj), 11)
        << pad(format_pvalue(row.p_adj), 10) << pad(decision_name(row.decision), 10) << "\n";
  }
}

void render_simulation_text(const Report& report, std::ostream& out) {
  const SimResult& sim = *report.simulation;
  const Design& design = *report.design;
  out << "simulation: design " << design_summary(design) << "\n";
  out << "replications = " << sim.replications << ", seed = " << sim.seed;
  if (sim.redraws) out << ", redraws = " << sim.redraws;
  out << "\n";
  out << "truly non-null effects:";
  if (sim.truth.nonnull_effects.empty()) {
    out << " (none)";
  } else {
    for (EffectId e : sim.truth.nonnull_effects) out << " " << effect_label(design, e);
  }
  out << "\n\n";
  out << pad("method", 12, false) << pad("FWER", 9) << pad("SE", 9) << pad("FDR", 9) << "\n";
  for (const MethodResult& mr : sim.methods) {
    out << pad(std::string(method_name(mr.method)), 12, false) << pad(format_pvalue(mr.fwer_hat), 9)
        << pad(format_pvalue(mr.fwer_se), 9) << pad(format_pvalue(mr.fdr_hat), 9) << "\n";
  }
  if (!sim.truth.nonnull_effects.empty()) {
    out << "\npower (rejection rate of non-null effects)\n";
    out << pad("method", 12, false) << pad("effect", 12, false) << pad("rate", 9) << "\n";
    for (const MethodResult& mr : sim.methods) {
      for (std::size_t e = 0; e < sim.family.size(); ++e) {
        for (EffectId nn : sim.truth.nonnull_effects) {
          if (sim.family[e] == nn) {
            out << pad(std::string(method_name(mr.method)), 12, false)
                << pad(effect_label(design, sim.family[e]), 12, false)
                << pad(format_pvalue(mr.effect_rejection_rate[e]), 9) << "\n";
          }
        }
      }
    }
  }
  if (report.band) {
    for (const MethodResult& mr : sim.methods) {
      if (mr.method != report.band->method) continue;
      const bool pass = mr.fwer_hat > report.band->lo && mr.fwer_hat < report.band->hi;
      out << "\nband check: FWER(" << method_name(mr.method) << ") = "
          << format_pvalue(mr.fwer_hat) << " in (" << sig6(report.band->lo) << ", "
          << sig6(report.band->hi) << "): " << (pass ? "PASS" : "FAIL") << "\n";
    }
  }
}

void render_bounds_text(const Report& report, std::ostream& out) {
  out << "independence bound: P(at least one rejection | all null, independent tests)\n";
  out << pad("m", 4, false) << pad("alpha", 8) << pad("bound", 12) << "\n";
  for (const auto& [m, alpha, bound] : report.bounds) {
    out << pad(std::to_string(m), 4, false) << pad(sig6(alpha), 8) << pad(fmt("%.7f", bound), 12)
        << "\n";
  }
}

// ---- json ----

json design_json(const Design& design) {
  json factors = json::array();
  for (const Factor& f : design.factors()) {
    factors.push_back({{"name", f.name}, {"levels", f.levels}});
  }
  return {{"factors", factors}, {"n_per_cell", design.n_per_cell()}};
}

json anova_json(const Report& report) {
  const AnovaTable& t = *report.anova;
  json rows = json::array();
  for (const AnovaRow& row : t.rows) {
    rows.push_back({{"effect", effect_label(*report.design, row.effect)},
                    {"ss", row.ss},
                    {"df", row.df},
                    {"ms", row.ms},
                    {"f", row.f},
                    {"p", row.p}});
  }
  json out = {{"rows", rows},        {"error_ss", t.error_ss}, {"error_df", t.error_df},
              {"mse", t.mse},        {"total_ss", t.total_ss}, {"grand_mean", t.grand_mean}};
  if (report.omnibus) {
    out["omnibus"] = {{"f", report.omnibus->f},
                      {"df1", report.omnibus->df1},
                      {"df2", report.omnibus->df2},
                      {"p", report.omnibus->p}};
  }
  return out;
}

json decisions_json(const DecisionTable& table) {
  json rows = json::array();
  for (const DecisionRow& row : table.rows) {
    rows.push_back({{"label", row.label},
                    {"p", row.p},
                    {"rank", row.rank},
                    {"alpha_adj", row.alpha_adj},
                    {"p_adj", row.p_adj},
                    {"decision", decision_name(row.decision)}});
  }
  json out = {{"method", std::string(method_name(table.method))},
              {"alpha", table.alpha},
              {"rows", rows}};
  if (table.gate) {
    out["gate"] = {{"f", table.gate->f},
                   {"df1", table.gate->df1},
                   {"df2", table.gate->df2},
                   {"p", table.gate->p},
                   {"open", table.gate->open}};
  }
  return out;
}

json simulation_json(const Report& report) {
  const SimResult& sim = *report.simulation;
  const Design& design = *report.design;
  const auto labels = [&](const std::vector<EffectId>& effects) {
    json arr = json::array();
    for (EffectId e : effects) arr.push_back(effect_label(design, e));
    return arr;
  };
  json methods = json::array();
  for (const MethodResult& mr : sim.methods) {
    json rates = json::object();
    json power = json::object();
    for (std::size_t e = 0; e < sim.family.size(); ++e) {
      const std::string label = effect_label(design, sim.family[e]);
      rates[label] = mr.effect_rejection_rate[e];
      for (EffectId nn : sim.truth.nonnull_effects) {
        if (sim.family[e] == nn) power[label] = mr.effect_rejection_rate[e];
      }
    }
    methods.push_back({{"method", std::string(method_name(mr.method))},
                       {"fwer", mr.fwer_hat},
                       {"fwer_se", mr.fwer_se},
                       {"fdr", mr.fdr_hat},
                       {"effect_rejection_rate", rates},
                       {"power", power}});
  }
  json out = {{"replications", sim.replications},
              {"seed", sim.seed},
              {"redraws", sim.redraws},
              {"family", labels(sim.family)},
              {"null_effects", labels(sim.truth.null_effects)},
              {"nonnull_effects", labels(sim.truth.nonnull_effects)},
              {"methods", methods}};
  if (report.band) {
    for (const MethodResult& mr : sim.methods) {
      if (mr.method != report.band->method) continue;
      out["band"] = {{"method", std::string(method_name(report.band->method))},
                     {"lo", report.band->lo},
                     {"hi", report.band->hi},
                     {"fwer", mr.fwer_hat},
                     {"pass", mr.fwer_hat > report.band->lo && mr.fwer_hat < report.band->hi}};
    }
  }
  return out;
}

// ---- csv ----

constexpr const char* kCsvHeader =
    "section,method,label,ss,df,df2,ms,f,p,rank,alpha_adj,p_adj,decision,fwer,fwer_se,fdr,rate,"
    "m,alpha,value,lo,hi";

class CsvRow {
public:
  CsvRow& set(int column, std::string value) {
    if (static_cast<std::size_t>(column) >= cells_.size()) cells_.resize(column + 1);
    cells_[static_cast<std::size_t>(column)] = std::move(value);
    return *this;
  }
  std::string str(std::size_t width) const {
    std::string out;
    for (std::size_t i = 0; i < width; ++i) {
      if (i) out += ',';
      if (i < cells_.size()) out += cells_[i];
    }
    return out;
  }

private:
  std::vector<std::string> cells_;
};

enum CsvCol {
  kSection = 0, kMethod, kLabel, kSs, kDf, kDf2, kMs, kF, kP, kRank, kAlphaAdj, kPAdj,
  kDecision, kFwer, kFwerSe, kFdr, kRate, kM, kAlpha, kValue, kLo, kHi, kCsvColumns
};

void render_csv(const Report& report, std::ostream& out) {
  std::vector<CsvRow> rows;
  if (report.anova) {
    const AnovaTable& t = *report.anova;
    for (const AnovaRow& row : t.rows) {
      rows.emplace_back(CsvRow()
                            .set(kSection, "anova")
                            .set(kLabel, effect_label(*report.design, row.effect))
                            .set(kSs, full(row.ss))
                            .set(kDf, std::to_string(row.df))
                            .set(kMs, full(row.ms))
                            .set(kF, full(row.f))
                            .set(kP, full(row.p)));
    }
    rows.emplace_back(CsvRow()
                          .set(kSection, "anova")
                          .set(kLabel, "error")
                          .set(kSs, full(t.error_ss))
                          .set(kDf, std::to_string(t.error_df))
                          .set(kMs, full(t.mse)));
    rows.emplace_back(
        CsvRow().set(kSection, "anova").set(kLabel, "total").set(kSs, full(t.total_ss)));
    if (report.omnibus) {
      rows.emplace_back(CsvRow()
                            .set(kSection, "omnibus")
                            .set(kF, full(report.omnibus->f))
                            .set(kDf, std::to_string(report.omnibus->df1))
                            .set(kDf2, std::to_string(report.omnibus->df2))
                            .set(kP, full(report.omnibus->p)));
    }
  }
  for (const DecisionTable& table : report.decisions) {
    if (table.gate) {
      rows.emplace_back(CsvRow()
                            .set(kSection, "gate")
                            .set(kMethod, std::string(method_name(table.method)))
                            .set(kF, full(table.gate->f))
                            .set(kDf, std::to_string(table.gate->df1))
                            .set(kDf2, std::to_string(table.gate->df2))
                            .set(kP, full(table.gate->p))
                            .set(kDecision, table.gate->open ? "open" : "closed"));
    }
    for (const DecisionRow& row : table.rows) {
      rows.emplace_back(CsvRow()
                            .set(kSection, "decision")
                            .set(kMethod, std::string(method_name(table.method)))
                            .set(kLabel, row.label)
                            .set(kP, full(row.p))
                            .set(kRank, std::to_string(row.rank))
                            .set(kAlphaAdj, full(row.alpha_adj))
                            .set(kPAdj, full(row.p_adj))
                            .set(kDecision, decision_name(row.decision))
                            .set(kAlpha, full(table.alpha)));
    }
  }
  if (report.simulation) {
    const SimResult& sim = *report.simulation;
    for (const MethodResult& mr : sim.methods) {
      rows.emplace_back(CsvRow()
                            .set(kSection, "simulation")
                            .set(kMethod, std::string(method_name(mr.method)))
                            .set(kFwer, full(mr.fwer_hat))
                            .set(kFwerSe, full(mr.fwer_se))
                            .set(kFdr, full(mr.fdr_hat)));
      for (std::size_t e = 0; e < sim.family.size(); ++e) {
        rows.emplace_back(CsvRow()
                              .set(kSection, "rejection_rate")
                              .set(kMethod, std::string(method_name(mr.method)))
                              .set(kLabel, effect_label(*report.design, sim.family[e]))
                              .set(kRate, full(mr.effect_rejection_rate[e])));
      }
      if (report.band && mr.method == report.band->method) {
        rows.emplace_back(CsvRow()
                              .set(kSection, "band")
                              .set(kMethod, std::string(method_name(mr.method)))
                              .set(kFwer, full(mr.fwer_hat))
                              .set(kLo, full(report.band->lo))
                              .set(kHi, full(report.band->hi))
                              .set(kDecision, mr.fwer_hat > report.band->lo &&
                                                      mr.fwer_hat < report.band->hi
                                                  ? "pass"
                                                  : "fail"));
      }
    }
  }
  for (const auto& [m, alpha, bound] : report.bounds) {
    rows.emplace_back(CsvRow()
                          .set(kSection, "bound")
                          .set(kM, std::to_string(m))
                          .set(kAlpha, full(alpha))
                          .set(kValue, full(bound)));
  }

  out << kCsvHeader << "\n";
  for (const CsvRow& row : rows) out << row.str(kCsvColumns) << "\n";
}

}  // namespace

std::string format_pvalue(double p) { return fmt("%.4f", p); }

OutputFormat parse_output_format(std::string_view name) {
  if (name == "text") return OutputFormat::text;
  if (name == "json") return OutputFormat::json;
  if (name == "csv") return OutputFormat::csv;
  throw validation_error("unknown output format '" + std::string(name) +
                         "' (expected text|json|csv)");
}

std::string Report::render(OutputFormat format) const {
  std::ostringstream out;
  switch (format) {
    case OutputFormat::text: {
      if (anova) render_anova_text(*this, out);
      for (const DecisionTable& table : decisions) render_decisions_text(table, out);
      if (simulation) {
        if (anova || !decisions.empty()) out << "\n";
        render_simulation_text(*this, out);
      }
      if (!bounds.empty()) render_bounds_text(*this, out);
      break;
    }
    case OutputFormat::json: {
      json doc = json::object();
      if (design) doc["design"] = design_json(*design);
      if (anova) doc["anova_table"] = anova_json(*this);
      if (!decisions.empty()) {
        json arr = json::array();
        for (const DecisionTable& table : decisions) arr.push_back(decisions_json(table));
        doc["decisions"] = arr;
      }
      if (simulation) doc["simulation"] = simulation_json(*this);
      if (!bounds.empty()) {
        json arr = json::array();
        for (const auto& [m, alpha, bound] : bounds) {
          arr.push_back({{"m", m}, {"alpha", alpha}, {"bound", bound}});
        }
        doc["bounds"] = arr;
      }
      out << doc.dump(2) << "\n";
      break;
    }
    case OutputFormat::csv:
      render_csv(*this, out);
      break;
  }
  return out.str();
}

}  // namespace multiway
