#pragma once

#include <optional>
#include <string>
#include <vector>

#include "multiway/anova.hpp"
#include "multiway/corrections.hpp"
#include "multiway/simulation.hpp"

namespace multiway {

enum class OutputFormat { text, json, csv };

OutputFormat parse_output_format(std::string_view name);

/// FWER acceptance band printed with all-null simulation reports.
struct FwerBand {
  Method method = Method::none;
  double lo = 0.0;
  double hi = 1.0;
};

/// Everything one command run wants to emit. Only the parts that are present
/// are rendered; numeric values are identical across the three formats (text
/// rounds p-values to 4 decimals, json and csv keep full precision).
struct Report {
  std::optional<Design> design;
  std::optional<AnovaTable> anova;
  std::optional<OmnibusF> omnibus;
  std::vector<DecisionTable> decisions;
  std::optional<SimResult> simulation;
  std::optional<FwerBand> band;
  /// Rows of (m, alpha, bound) for the independence-bound table.
  std::vector<std::tuple<int, double, double>> bounds;

  std::string render(OutputFormat format) const;
};

/// "0.0329"-style fixed 4-decimal formatting used for p-values in text
/// reports.
std::string format_pvalue(double p);

}  // namespace multiway
