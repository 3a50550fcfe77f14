#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#ifndef MULTIWAY_CLI_PATH
#error "MULTIWAY_CLI_PATH must point at the built multiway binary"
#endif
#ifndef MULTIWAY_TEST_DATA_DIR
#error "MULTIWAY_TEST_DATA_DIR must point at tests/data"
#endif

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;
};

// Runs the CLI with stderr folded into stdout unless the caller redirects
// explicitly.
CliResult run_cli(const std::string& args, bool stderr_only = false) {
  const std::string redirect = stderr_only ? " 2>&1 1>/dev/null" : " 2>&1";
  const std::string cmd = std::string(MULTIWAY_CLI_PATH) + " " + args + redirect;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult result;
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) {
    result.output.append(buf, n);
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

const std::string kTable1 = std::string(MULTIWAY_TEST_DATA_DIR) + "/table1_2x3.csv";

nlohmann::json parse_json(const CliResult& result) {
  REQUIRE(result.exit_code == 0);
  return nlohmann::json::parse(result.output);
}

class TempFile {
public:
  TempFile(const std::string& name, const std::string& contents)
      : path_(std::filesystem::temp_directory_path() / name) {
    std::ofstream(path_) << contents;
  }
  ~TempFile() { std::filesystem::remove(path_); }
  std::string str() const { return path_.string(); }

private:
  std::filesystem::path path_;
};

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("anova reproduces the worked decision tables") {
  const auto result = run_cli("anova --input " + kTable1 +
                              " --response score --factors G,E --method holm --method bh "
                              "--format json");
  const auto doc = parse_json(result);

  const auto& rows = doc["anova_table"]["rows"];
  REQUIRE(rows.size() == 3);
  CHECK(rows[0]["effect"] == "G");
  CHECK(std::fabs(rows[0]["f"].get<double>() - 5.0) < 1e-9);
  CHECK(std::fabs(rows[1]["f"].get<double>() - 4.0) < 1e-9);
  CHECK(std::fabs(rows[2]["f"].get<double>() - 4.5) < 1e-9);
  CHECK(doc["anova_table"]["error_df"] == 30);

  REQUIRE(doc["decisions"].size() == 2);
  const auto& holm = doc["decisions"][0];
  CHECK(holm["method"] == "holm");
  REQUIRE(holm["rows"].size() == 3);
  CHECK(holm["rows"][0]["label"] == "GxE");
  CHECK(std::fabs(holm["rows"][0]["alpha_adj"].get<double>() - 0.05 / 3) < 1e-12);
  CHECK(std::fabs(holm["rows"][1]["alpha_adj"].get<double>() - 0.025) < 1e-12);
  CHECK(std::fabs(holm["rows"][2]["alpha_adj"].get<double>() - 0.05) < 1e-12);
  for (const auto& row : holm["rows"]) CHECK(row["decision"] == "retained");

  const auto& bh = doc["decisions"][1];
  CHECK(bh["method"] == "bh");
  CHECK(std::fabs(bh["rows"][1]["alpha_adj"].get<double>() - 0.05 * 2 / 3) < 1e-12);
  for (const auto& row : bh["rows"]) CHECK(row["decision"] == "rejected");
}

TEST_CASE("anova text output shows the paper-style table") {
  const auto result = run_cli("anova --input " + kTable1 +
                              " --response score --factors G,E --method holm");
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("0.0329") != std::string::npos);
  CHECK(result.output.find("0.0288") != std::string::npos);
  CHECK(result.output.find("0.0195") != std::string::npos);
  CHECK(result.output.find("0.0167") != std::string::npos);
  CHECK(result.output.find("retained") != std::string::npos);
}

TEST_CASE("anova default method is uncorrected") {
  const auto doc = parse_json(run_cli("anova --input " + kTable1 +
                                      " --response score --factors G,E --format json"));
  REQUIRE(doc["decisions"].size() == 1);
  CHECK(doc["decisions"][0]["method"] == "none");
  for (const auto& row : doc["decisions"][0]["rows"]) CHECK(row["decision"] == "rejected");
}

TEST_CASE("anova with a preregistered family uses m = 2 thresholds") {
  const auto doc = parse_json(run_cli("anova --input " + kTable1 +
                                      " --response score --factors G,E --family G,GxE "
                                      "--method bonferroni --format json"));
  const auto& rows = doc["anova_table"]["rows"];
  REQUIRE(rows.size() == 2);
  const auto& decisions = doc["decisions"][0]["rows"];
  REQUIRE(decisions.size() == 2);
  for (const auto& row : decisions) {
    CHECK(std::fabs(row["alpha_adj"].get<double>() - 0.025) < 1e-12);
  }
}

TEST_CASE("anova rejects omnibus combined with a family restriction") {
  const auto result = run_cli("anova --input " + kTable1 +
                              " --response score --factors G,E --family G --method omnibus");
  CHECK(result.exit_code == 2);
}

TEST_CASE("anova omnibus gate reports the gate") {
  const auto doc = parse_json(run_cli("anova --input " + kTable1 +
                                      " --response score --factors G,E --method omnibus "
                                      "--format json"));
  const auto& gate = doc["decisions"][0]["gate"];
  CHECK(gate["df1"] == 5);
  CHECK(gate["df2"] == 30);
  CHECK(gate["open"].is_boolean());
}

TEST_CASE("validation failures exit 2 with a one-line error on stderr") {
  TempFile unbalanced("multiway_unbalanced.csv",
                      "G,E,score\nf,lo,1\nf,lo,2\nf,hi,3\nf,hi,4\nm,lo,5\nm,lo,6\nm,hi,7\n");
  const auto result =
      run_cli("anova --input " + unbalanced.str() + " --response score --factors G,E", true);
  CHECK(result.exit_code == 2);
  CHECK(result.output.rfind("error: validation:", 0) == 0);
  CHECK(std::count(result.output.begin(), result.output.end(), '\n') == 1);
}

TEST_CASE("degenerate data exits 3") {
  TempFile constant("multiway_constant.csv",
                    "G,E,score\nf,lo,1\nf,lo,1\nf,hi,1\nf,hi,1\nm,lo,1\nm,lo,1\nm,hi,1\nm,hi,1\n");
  const auto result =
      run_cli("anova --input " + constant.str() + " --response score --factors G,E", true);
  CHECK(result.exit_code == 3);
  CHECK(result.output.rfind("error: numeric:", 0) == 0);
}

TEST_CASE("adjust matches the worked example") {
  const auto doc = parse_json(run_cli("adjust .0195 .0288 .0329 --method holm --format json"));
  const auto& rows = doc["decisions"][0]["rows"];
  REQUIRE(rows.size() == 3);
  for (const auto& row : rows) {
    CHECK(std::fabs(row["p_adj"].get<double>() - 0.0585) < 1e-12);
    CHECK(row["decision"] == "retained");
  }
}

TEST_CASE("adjust reads files and validates the range") {
  TempFile pfile("multiway_pvalues.txt", ".0195 .0288\n.0329\n");
  const auto doc =
      parse_json(run_cli("adjust --input " + pfile.str() + " --method bh --format json"));
  CHECK(doc["decisions"][0]["rows"].size() == 3);

  CHECK(run_cli("adjust 1.5").exit_code == 2);
  CHECK(run_cli("adjust").exit_code == 2);
  CHECK(run_cli("adjust .5 --method omnibus").exit_code == 2);
}

TEST_CASE("adjust single value is a no-op") {
  const auto doc = parse_json(run_cli("adjust .03 --method bonferroni --format json"));
  CHECK(doc["decisions"][0]["rows"][0]["p_adj"].get<double>() == 0.03);
}

TEST_CASE("simulate presets") {
  SUBCASE("bound table") {
    const auto doc = parse_json(run_cli("simulate --preset paper-bound-table --format json"));
    REQUIRE(doc["bounds"].size() == 3);
    CHECK(doc["bounds"][0]["m"] == 3);
    CHECK(std::fabs(doc["bounds"][0]["bound"].get<double>() - 0.142625) < 1e-12);
    CHECK(std::fabs(doc["bounds"][1]["bound"].get<double>() - 0.3016627) < 1e-6);
    CHECK(std::fabs(doc["bounds"][2]["bound"].get<double>() - 0.5367088) < 1e-6);
  }
  SUBCASE("bound table text") {
    const auto result = run_cli("simulate --preset paper-bound-table");
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("0.1426250") != std::string::npos);
    CHECK(result.output.find("0.3016627") != std::string::npos);
    CHECK(result.output.find("0.5367088") != std::string::npos);
  }
  SUBCASE("all-null preset carries the FWER band, overridable reps") {
    const auto doc = parse_json(
        run_cli("simulate --preset paper-2x3-allnull --reps 2000 --threads 2 --format json"));
    CHECK(doc["simulation"]["replications"] == 2000);
    CHECK(doc["simulation"]["band"]["lo"].get<double>() == 0.125);
    CHECK(doc["simulation"]["band"]["hi"].get<double>() == 0.1427);
    CHECK(doc["simulation"]["methods"].size() == 5);
  }
  SUBCASE("unknown preset") {
    CHECK(run_cli("simulate --preset nope").exit_code == 2);
  }
}

TEST_CASE("simulate flags: pattern, determinism across runs") {
  const std::string flags =
      "simulate --design 2x2 --n 4 --pattern main:A:2 --method holm --reps 500 --seed 99 "
      "--format json";
  const auto a = parse_json(run_cli(flags));
  const auto b = parse_json(run_cli(flags));
  CHECK(a == b);
  CHECK(a["simulation"]["nonnull_effects"] == nlohmann::json::array({"A"}));
  CHECK(a["simulation"]["methods"][0]["power"]["A"].get<double>() > 0.5);
}

TEST_CASE("simulate validation errors") {
  CHECK(run_cli("simulate --reps 0").exit_code == 2);
  CHECK(run_cli("simulate --design 1x3").exit_code == 2);
  CHECK(run_cli("simulate --pattern cells:1,2").exit_code == 2);
  CHECK(run_cli("simulate --pattern main:Z:2").exit_code == 2);
  CHECK(run_cli("simulate --sigma 0").exit_code == 2);
}

TEST_CASE("simulate config file with flag overrides") {
  TempFile config("multiway_sim.cfg",
                  "# scenario\ndesign = 2x2\nn = 3\nreps = 120\nseed = 5\nmethods = none,holm\n");
  const auto doc =
      parse_json(run_cli("simulate --config " + config.str() + " --format json"));
  CHECK(doc["simulation"]["replications"] == 120);
  CHECK(doc["simulation"]["seed"] == 5);
  CHECK(doc["simulation"]["methods"].size() == 2);

  const auto overridden = parse_json(
      run_cli("simulate --config " + config.str() + " --reps 60 --format json"));
  CHECK(overridden["simulation"]["replications"] == 60);

  TempFile bad("multiway_bad.cfg", "repz = 10\n");
  CHECK(run_cli("simulate --config " + bad.str()).exit_code == 2);
}

TEST_CASE("csv output round-trips through the csv reader") {
  const auto result = run_cli("anova --input " + kTable1 +
                              " --response score --factors G,E --method bh --format csv");
  CHECK(result.exit_code == 0);
  CHECK(result.output.rfind("section,", 0) == 0);
  CHECK(result.output.find("\ndecision,bh,") != std::string::npos);
}

}  // TEST_SUITE
