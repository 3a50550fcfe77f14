// multiway: balanced multiway ANOVA with family-aware multiplicity control.
//
// Subcommands:
//   anova     ANOVA + decision tables from a long-format CSV file
//   adjust    multiplicity-adjusted p-values for a raw p-value vector
//   simulate  Monte Carlo FWER/FDR/power estimation for a chosen scenario

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "multiway/corrections.hpp"
#include "multiway/csv.hpp"
#include "multiway/design.hpp"
#include "multiway/report.hpp"
#include "multiway/simulation.hpp"

namespace {

using namespace multiway;

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

double parse_double(const std::string& text, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw validation_error(what + " '" + text + "' is not numeric");
  }
}

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw validation_error(what + " '" + text + "' is not a nonnegative integer");
  }
}

std::vector<Method> parse_methods(const std::vector<std::string>& names) {
  std::vector<Method> methods;
  for (const std::string& name : names) methods.push_back(parse_method(name));
  return methods;
}

DecisionTable decisions_for(Method method, const PValueVector& pv, double alpha) {
  switch (method) {
    case Method::none: return uncorrected_decisions(pv, alpha);
    case Method::bonferroni: return bonferroni_decisions(pv, alpha);
    case Method::holm: return holm_decisions(pv, alpha);
    case Method::bh: return bh_decisions(pv, alpha);
    case Method::omnibus_gate:
      throw validation_error("omnibus gate needs an ANOVA table, not raw p-values");
  }
  throw validation_error("unknown method");
}

// ---- anova ----

struct AnovaArgs {
  std::string input;
  std::string response;
  std::vector<std::string> factors;
  double alpha = 0.05;
  std::vector<std::string> methods{"none"};
  std::string family;
  std::string format = "text";
};

int run_anova(const AnovaArgs& args) {
  const IngestResult ingest = ingest_csv(std::filesystem::path(args.input), args.response,
                                         args.factors);
  const Design& design = ingest.dataset.design();

  FamilySpec spec = FamilySpec::exploratory();
  if (!args.family.empty()) {
    std::vector<EffectId> declared;
    for (const std::string& label : split(args.family, ',')) {
      declared.push_back(parse_effect_label(design, label));
    }
    spec = FamilySpec::preregistered(std::move(declared));
  }
  const std::vector<EffectId> family = resolve_family(design, spec);
  const std::vector<Method> methods = parse_methods(args.methods);

  const AnovaTable table = anova_table(ingest.dataset, family);

  std::vector<PEntry> entries;
  for (const AnovaRow& row : table.rows) {
    entries.push_back({effect_label(design, row.effect), row.p});
  }
  const PValueVector pv(std::move(entries));

  Report report;
  report.design = design;
  report.anova = table;
  for (Method method : methods) {
    if (method == Method::omnibus_gate) {
      if (spec.mode == FamilyMode::preregistered) {
        throw validation_error(
            "the omnibus gate pools the full family and cannot be combined with --family");
      }
      report.decisions.push_back(omnibus_gate(design, table, args.alpha));
    } else {
      report.decisions.push_back(decisions_for(method, pv, args.alpha));
    }
  }
  std::cout << report.render(parse_output_format(args.format));
  return 0;
}

// ---- adjust ----

struct AdjustArgs {
  std::vector<std::string> values;
  std::string input;
  double alpha = 0.05;
  std::vector<std::string> methods{"holm"};
  std::string format = "text";
};

int run_adjust(const AdjustArgs& args) {
  std::vector<std::string> raw = args.values;
  if (!args.input.empty()) {
    std::ifstream in(args.input);
    if (!in) throw validation_error("cannot open '" + args.input + "'");
    std::string token;
    while (in >> token) raw.push_back(token);
  }
  if (raw.empty()) {
    throw validation_error("no p-values given (pass them as arguments or via --input)");
  }

  std::vector<PEntry> entries;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    entries.push_back({"p" + std::to_string(i + 1), parse_double(raw[i], "p-value")});
  }
  const PValueVector pv(std::move(entries));  // validates [0, 1]

  Report report;
  for (Method method : parse_methods(args.methods)) {
    if (method == Method::none) {
      report.decisions.push_back(uncorrected_decisions(pv, args.alpha));
      continue;
    }
    report.decisions.push_back(decisions_for(method, pv, args.alpha));
  }
  std::cout << report.render(parse_output_format(args.format));
  return 0;
}

// ---- simulate ----

struct SimulateArgs {
  std::string preset;
  std::string config_file;
  std::string design = "2x3";
  std::string n = "6";
  std::string sigma = "1";
  std::string alpha = "0.05";
  std::string pattern = "all-null";
  std::vector<std::string> methods;
  std::string reps = "10000";
  std::string seed = "42";
  std::string threads = "0";
  std::string format = "text";
};

Design make_design(const std::string& spec, int n_per_cell) {
  std::vector<Factor> factors;
  int name = 0;
  for (const std::string& part : split(spec, 'x')) {
    const double levels = parse_double(part, "level count");
    if (levels < 2 || levels != static_cast<int>(levels)) {
      throw validation_error("level count '" + part + "' must be an integer >= 2");
    }
    factors.push_back({std::string(1, static_cast<char>('A' + name++)), static_cast<int>(levels)});
  }
  return Design(std::move(factors), n_per_cell);
}

std::vector<double> make_pattern(const Design& design, const std::string& pattern) {
  const auto cells = static_cast<std::size_t>(design.cell_count());
  if (pattern == "all-null") {
    return std::vector<double>(cells, 0.0);
  }
  if (pattern.rfind("main:", 0) == 0) {
    const std::vector<std::string> parts = split(pattern, ':');
    if (parts.size() != 3) {
      throw validation_error("expected main:<factor>:<delta>, got '" + pattern + "'");
    }
    const int j = design.factor_index(parts[1]);
    if (j < 0) throw validation_error("unknown factor '" + parts[1] + "' in pattern");
    const double delta = parse_double(parts[2], "delta");
    // Linear spread with range delta across the factor's levels; every other
    // effect stays null.
    std::vector<double> means(cells, 0.0);
    std::int64_t suffix = 1;
    for (int f = j + 1; f < design.factor_count(); ++f) suffix *= design.levels(f);
    const int levels = design.levels(j);
    for (std::size_t c = 0; c < cells; ++c) {
      const auto level = static_cast<int>((static_cast<std::int64_t>(c) / suffix) % levels);
      means[c] = delta * (static_cast<double>(level) / (levels - 1) - 0.5);
    }
    return means;
  }
  if (pattern.rfind("cells:", 0) == 0) {
    const std::vector<std::string> values = split(pattern.substr(6), ',');
    if (values.size() != cells) {
      throw validation_error("pattern lists " + std::to_string(values.size()) +
                             " cell means, design has " + std::to_string(cells) + " cells");
    }
    std::vector<double> means;
    for (const std::string& v : values) means.push_back(parse_double(v, "cell mean"));
    return means;
  }
  throw validation_error("unknown pattern '" + pattern +
                         "' (expected all-null, main:<factor>:<delta>, or cells:<v1,...>)");
}

int run_simulate(const CLI::App& cmd, SimulateArgs args) {
  // Layering: defaults < preset < config file < explicit flags.
  std::optional<FwerBand> band;
  if (!args.preset.empty()) {
    const auto overridable = [&](const char* flag, const std::string& value, std::string& slot) {
      if (cmd.count(flag) == 0) slot = value;
    };
    if (args.preset == "paper-bound-table") {
      const double alpha = parse_double(args.alpha, "alpha");
      Report report;
      for (int m : {3, 7, 15}) {
        report.bounds.emplace_back(m, alpha, independence_bound(m, alpha));
      }
      std::cout << report.render(parse_output_format(args.format));
      return 0;
    }
    if (args.preset == "paper-2x3-allnull") {
      overridable("--design", "2x3", args.design);
      overridable("--n", "6", args.n);
      overridable("--pattern", "all-null", args.pattern);
      overridable("--reps", "200000", args.reps);
      if (cmd.count("--method") == 0) {
        args.methods = {"none", "bonferroni", "holm", "bh", "omnibus"};
      }
      band = FwerBand{Method::none, 0.125, 0.1427};
    } else if (args.preset == "paper-2x3-allnull-n100") {
      overridable("--design", "2x3", args.design);
      overridable("--n", "100", args.n);
      overridable("--pattern", "all-null", args.pattern);
      overridable("--reps", "200000", args.reps);
      if (cmd.count("--method") == 0) {
        args.methods = {"none", "bonferroni", "holm", "bh", "omnibus"};
      }
      band = FwerBand{Method::none, 0.142625 - 0.006, 0.142625 + 0.006};
    } else if (args.preset == "paper-omnibus-partial") {
      overridable("--design", "2x2x2", args.design);
      overridable("--n", "10", args.n);
      overridable("--pattern", "main:A:3", args.pattern);
      overridable("--reps", "100000", args.reps);
      if (cmd.count("--method") == 0) {
        args.methods = {"omnibus", "none", "holm"};
      }
      band = FwerBand{Method::omnibus_gate, 0.10, 1.0};
    } else {
      throw validation_error("unknown preset '" + args.preset +
                             "' (expected paper-2x3-allnull, paper-2x3-allnull-n100, "
                             "paper-omnibus-partial, or paper-bound-table)");
    }
  }

  if (!args.config_file.empty()) {
    std::ifstream in(args.config_file);
    if (!in) throw validation_error("cannot open '" + args.config_file + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto strip = [](std::string s) {
        s.erase(0, s.find_first_not_of(" \t\r"));
        const auto last = s.find_last_not_of(" \t\r");
        s.erase(last == std::string::npos ? 0 : last + 1);
        return s;
      };
      line = strip(line);
      if (line.empty() || line[0] == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw validation_error(args.config_file + ":" + std::to_string(line_no) +
                               ": expected key = value");
      }
      kv[strip(line.substr(0, eq))] = strip(line.substr(eq + 1));
    }
    const auto apply = [&](const char* flag, const char* key, std::string& slot) {
      if (cmd.count(flag) == 0 && kv.contains(key)) slot = kv.at(key);
    };
    apply("--design", "design", args.design);
    apply("--n", "n", args.n);
    apply("--sigma", "sigma", args.sigma);
    apply("--alpha", "alpha", args.alpha);
    apply("--pattern", "pattern", args.pattern);
    apply("--reps", "reps", args.reps);
    apply("--seed", "seed", args.seed);
    apply("--threads", "threads", args.threads);
    if (cmd.count("--method") == 0 && kv.contains("methods")) {
      args.methods = split(kv.at("methods"), ',');
    }
    for (const auto& [key, value] : kv) {
      static const std::set<std::string> known{"design", "n",    "sigma",   "alpha", "pattern",
                                               "reps",   "seed", "threads", "methods"};
      if (!known.contains(key)) {
        throw validation_error("unknown config key '" + key + "'");
      }
    }
  }

  if (args.methods.empty()) args.methods = {"none"};

  const double n_raw = parse_double(args.n, "n per cell");
  if (n_raw < 2 || n_raw != static_cast<int>(n_raw)) {
    throw validation_error("n per cell must be an integer >= 2, got '" + args.n + "'");
  }

  Design design = make_design(args.design, static_cast<int>(n_raw));
  std::vector<double> cell_means = make_pattern(design, args.pattern);
  SimConfig config{std::move(design),
                   std::move(cell_means),
                   parse_double(args.sigma, "sigma"),
                   parse_double(args.alpha, "alpha"),
                   parse_methods(args.methods),
                   parse_u64(args.reps, "replications"),
                   parse_u64(args.seed, "seed")};
  validate(config);

  const auto threads = static_cast<int>(parse_u64(args.threads, "threads"));
  const SimResult result = simulate(config, threads);

  Report report;
  report.design = config.design;
  report.simulation = result;
  report.band = band;
  std::cout << report.render(parse_output_format(args.format));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"balanced multiway ANOVA with family-aware multiplicity control"};
  app.require_subcommand(1);

  AnovaArgs anova_args;
  CLI::App* anova_cmd = app.add_subcommand("anova", "ANOVA and decision tables from a CSV file");
  anova_cmd->add_option("--input", anova_args.input, "long-format CSV file")->required();
  anova_cmd->add_option("--response", anova_args.response, "response column name")->required();
  anova_cmd->add_option("--factors", anova_args.factors, "factor column names")
      ->required()
      ->delimiter(',');
  anova_cmd->add_option("--alpha", anova_args.alpha, "significance level (default 0.05)");
  anova_cmd->add_option("--method", anova_args.methods,
                        "none|bonferroni|holm|bh|omnibus (repeatable; default none)")
      ->delimiter(',');
  anova_cmd->add_option("--family", anova_args.family,
                        "preregistered family, e.g. \"G,GxE\" (default: all effects)");
  anova_cmd->add_option("--format", anova_args.format, "text|json|csv (default text)");

  AdjustArgs adjust_args;
  CLI::App* adjust_cmd = app.add_subcommand("adjust", "adjust a vector of p-values");
  adjust_cmd->add_option("pvalues", adjust_args.values, "p-values in [0,1]");
  adjust_cmd->add_option("--input", adjust_args.input, "file of whitespace-separated p-values");
  adjust_cmd->add_option("--alpha", adjust_args.alpha, "significance level (default 0.05)");
  adjust_cmd->add_option("--method", adjust_args.methods,
                         "bonferroni|holm|bh (repeatable; default holm)")
      ->delimiter(',');
  adjust_cmd->add_option("--format", adjust_args.format, "text|json|csv (default text)");

  SimulateArgs sim_args;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "Monte Carlo error-rate estimation");
  sim_cmd->add_option("--preset", sim_args.preset,
                      "paper-2x3-allnull | paper-2x3-allnull-n100 | paper-omnibus-partial | "
                      "paper-bound-table");
  sim_cmd->add_option("--config", sim_args.config_file, "key = value file mirroring the flags");
  sim_cmd->add_option("--design", sim_args.design, "level counts, e.g. 2x3 (default 2x3)");
  sim_cmd->add_option("--n", sim_args.n, "observations per cell (default 6)");
  sim_cmd->add_option("--sigma", sim_args.sigma, "noise standard deviation (default 1)");
  sim_cmd->add_option("--alpha", sim_args.alpha, "significance level (default 0.05)");
  sim_cmd->add_option("--pattern", sim_args.pattern,
                      "all-null | main:<factor>:<delta> | cells:<v1,v2,...> (default all-null)");
  sim_cmd->add_option("--method", sim_args.methods,
                      "none|bonferroni|holm|bh|omnibus (repeatable; default none)")
      ->delimiter(',');
  sim_cmd->add_option("--reps", sim_args.reps, "replications (default 10000)");
  sim_cmd->add_option("--seed", sim_args.seed, "RNG seed (default 42)");
  sim_cmd->add_option("--threads", sim_args.threads, "worker threads, 0 = auto (default 0)");
  sim_cmd->add_option("--format", sim_args.format, "text|json|csv (default text)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (anova_cmd->parsed()) return run_anova(anova_args);
    if (adjust_cmd->parsed()) return run_adjust(adjust_args);
    if (sim_cmd->parsed()) return run_simulate(*sim_cmd, sim_args);
  } catch (const validation_error& e) {
    std::cerr << "error: validation: " << e.what() << "\n";
    return 2;
  } catch (const numeric_error& e) {
    std::cerr << "error: numeric: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
