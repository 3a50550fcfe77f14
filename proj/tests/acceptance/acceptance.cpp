// Acceptance suite: every claim the toolkit is built around, checked end to
// end at fixed tolerances. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails. Runtime is dominated by the 200k-replicate Monte
// Carlo runs (a couple of minutes on one core).

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "multiway/anova.hpp"
#include "multiway/corrections.hpp"
#include "multiway/design.hpp"
#include "multiway/report.hpp"
#include "multiway/rng.hpp"
#include "multiway/simulation.hpp"
#include "multiway/special_functions.hpp"
#include "oracles.hpp"

namespace {

using namespace multiway;

int g_failures = 0;

void report_line(int criterion, const std::string& what, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion, what.c_str(),
              detail.c_str());
  if (!pass) ++g_failures;
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

constexpr std::uint64_t kSeed = 42;

// --- criterion 1: worked-example p-values -------------------------------

void criterion_1() {
  const double p1 = f_sf(5.0, 1, 30);
  const double p2 = f_sf(4.0, 2, 30);
  const double p3 = f_sf(4.5, 2, 30);
  const bool pass = std::fabs(p1 - 0.0329) < 5e-4 && std::fabs(p2 - 0.0288) < 5e-4 &&
                    std::fabs(p3 - 0.0195) < 5e-4;
  report_line(1, "F survival values .0329/.0288/.0195 within 5e-4",
              pass, fmt("got %.6f %.6f %.6f", p1, p2, p3));
}

// --- criterion 2: step-down vs step-up decision tables -------------------

void criterion_2() {
  const PValueVector pv({{"GxE", 0.0195}, {"E", 0.0288}, {"G", 0.0329}});
  const DecisionTable holm = holm_decisions(pv, 0.05);
  const DecisionTable bh = bh_decisions(pv, 0.05);

  const auto close4 = [](double a, double b) { return std::fabs(a - b) < 5e-5; };
  bool pass = holm.rows.size() == 3 && bh.rows.size() == 3;
  if (pass) {
    pass = close4(holm.rows[0].alpha_adj, 0.0167) && close4(holm.rows[1].alpha_adj, 0.0250) &&
           close4(holm.rows[2].alpha_adj, 0.0500) && close4(bh.rows[0].alpha_adj, 0.0167) &&
           close4(bh.rows[1].alpha_adj, 0.0333) && close4(bh.rows[2].alpha_adj, 0.0500);
    for (const DecisionRow& row : holm.rows) pass = pass && row.decision == Decision::retained;
    for (const DecisionRow& row : bh.rows) pass = pass && row.decision == Decision::rejected;
  }
  report_line(2, "holm retains all three, bh rejects all three, thresholds to 4 decimals", pass,
              fmt("holm alpha_adj %.4f/%.4f/%.4f, bh %.4f/%.4f/%.4f", holm.rows[0].alpha_adj,
                  holm.rows[1].alpha_adj, holm.rows[2].alpha_adj, bh.rows[0].alpha_adj,
                  bh.rows[1].alpha_adj, bh.rows[2].alpha_adj));
}

// --- criterion 3: independence bound ------------------------------------

void criterion_3() {
  const double b3 = independence_bound(3, 0.05);
  const double b7 = independence_bound(7, 0.05);
  const double b15 = independence_bound(15, 0.05);
  // "Exactly" up to the binary representation of .05: a few ulp.
  const bool pass = std::fabs(b3 - 0.142625) < 1e-15 && std::fabs(b7 - 0.3016627) < 1e-7 &&
                    std::fabs(b15 - 0.5367088) < 1e-7;
  report_line(3, "independence bound .142625/.3016627/.5367088", pass,
              fmt("got %.9f %.9f %.9f", b3, b7, b15));
}

// --- criteria 4, 6, 7: the all-null 2x3 run ------------------------------

SimResult allnull_2x3(int n_per_cell, std::uint64_t reps) {
  const SimConfig config = SimConfig::all_null(
      Design({{"G", 2}, {"E", 3}}, n_per_cell), 1.0, 0.05,
      {Method::none, Method::bonferroni, Method::holm, Method::bh}, reps, kSeed);
  return simulate(config);
}

void criterion_4(const SimResult& result) {
  const MethodResult& none = result.methods[0];
  const bool pass = none.fwer_hat > 0.125 && none.fwer_hat < 0.1427;
  report_line(4, "uncorrected FWER under dependence lies in (0.125, 0.1427)", pass,
              fmt("fwer %.5f se %.5f, independence bound 0.142625", none.fwer_hat, none.fwer_se));
}

void criterion_6(const SimResult& result) {
  const MethodResult& holm = result.methods[2];
  const bool pass = holm.fwer_hat <= 0.05 + 3.0 * holm.fwer_se;
  report_line(6, "holm FWER is controlled at 5%", pass,
              fmt("fwer %.5f se %.5f limit %.5f", holm.fwer_hat, holm.fwer_se,
                  0.05 + 3.0 * holm.fwer_se));
}

void criterion_7(const SimResult& result) {
  const MethodResult& bh = result.methods[3];
  const bool pass = bh.fdr_hat == bh.fwer_hat && bh.fdr_hat <= 0.05 + 3.0 * bh.fwer_se;
  report_line(7, "bh under the global null: FDR == FWER exactly and <= 5%", pass,
              fmt("fdr %.5f fwer %.5f se %.5f", bh.fdr_hat, bh.fwer_hat, bh.fwer_se));
}

// --- criterion 5: asymptotic independence at n = 100 ----------------------

void criterion_5() {
  const SimResult result = allnull_2x3(100, 200000);
  const double fwer = result.methods[0].fwer_hat;
  const bool pass = std::fabs(fwer - 0.142625) <= 0.006;
  report_line(5, "n = 100 FWER within 0.006 of the independence bound", pass,
              fmt("fwer %.5f vs 0.142625", fwer));
}

// --- criterion 8: omnibus gate fails under a partial null ----------------

void criterion_8() {
  SimConfig config = SimConfig::all_null(Design({{"A", 2}, {"B", 2}, {"C", 2}}, 10), 1.0, 0.05,
                                         {Method::omnibus_gate}, 100000, kSeed);
  // Strong main effect on A: delta/sigma = 3.
  for (std::int64_t c = 0; c < config.design.cell_count(); ++c) {
    config.cell_means[static_cast<std::size_t>(c)] = (c < 4) ? -1.5 : 1.5;
  }
  const SimResult result = simulate(config);
  const bool truth_ok = result.truth.nonnull_effects.size() == 1 &&
                        result.truth.null_effects.size() == 6;
  const double fwer = result.methods[0].fwer_hat;
  const bool pass = truth_ok && fwer > 0.10;
  report_line(8, "omnibus gate leaves FWER over the 6 null effects above 10%", pass,
              fmt("fwer %.5f over %zu null effects", fwer, result.truth.null_effects.size()));
}

// --- criterion 9: oracle equivalence for SS and omnibus F ----------------

void criterion_9() {
  Xoshiro256pp rng(271828);
  NormalSampler normals(314159);
  double worst_ss = 0.0;
  double worst_f = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 1 + static_cast<int>(rng.next() % 3);
    std::vector<Factor> factors;
    for (int i = 0; i < k; ++i) {
      factors.push_back({std::string(1, static_cast<char>('A' + i)),
                         2 + static_cast<int>(rng.next() % 3)});
    }
    const Design design(std::move(factors), 2 + static_cast<int>(rng.next() % 4));
    std::vector<double> y(static_cast<std::size_t>(design.total_n()));
    for (double& v : y) v = 1.0 + 0.8 * normals.next();

    const Dataset data = Dataset::from_cell_major(design, y);
    for (EffectId effect : enumerate_effects(design)) {
      const double mine = effect_ss(data, effect);
      const double oracle = test::projection_ss(design, y, effect);
      const double scale = std::max({std::fabs(mine), std::fabs(oracle), 1e-30});
      worst_ss = std::max(worst_ss, std::fabs(mine - oracle) / scale);
    }
    const auto table = anova_table(data, enumerate_effects(design));
    const double f_mine = omnibus_f(table).f;
    const double f_oracle = test::oneway_over_cells_f(design, y);
    worst_f = std::max(worst_f,
                       std::fabs(f_mine - f_oracle) / std::max(std::fabs(f_oracle), 1e-30));
  }
  const bool pass = worst_ss <= 1e-10 && worst_f <= 1e-10;
  report_line(9, "200 random datasets: SS and omnibus F match the oracles to 1e-10", pass,
              fmt("worst relative error: ss %.2e, omnibus %.2e", worst_ss, worst_f));
}

// --- criterion 10: decision-procedure property suite ----------------------

void criterion_10() {
  Xoshiro256pp rng(1618);
  std::uint64_t checked = 0;
  bool pass = true;
  std::string detail = "ok";
  for (int trial = 0; trial < 10000 && pass; ++trial) {
    const std::size_t m = 1 + rng.next() % 20;
    std::vector<double> p(m);
    for (double& v : p) v = rng.uniform01() * ((rng.next() % 3) ? 1.0 : 0.12);
    const double alpha = 0.05;

    const auto holm = kernel::reject_holm(p, alpha);
    const auto bh = kernel::reject_bh(p, alpha);
    const auto bonf = kernel::reject_bonferroni(p, alpha);
    const auto holm_adj = kernel::adjusted(Method::holm, p);
    const auto bh_adj = kernel::adjusted(Method::bh, p);

    for (std::size_t i = 0; i < m && pass; ++i) {
      if ((holm[i] != 0) != rejects(holm_adj[i], alpha)) {
        pass = false;
        detail = "holm adjusted-p mismatch";
      }
      if ((bh[i] != 0) != rejects(bh_adj[i], alpha)) {
        pass = false;
        detail = "bh adjusted-p mismatch";
      }
      if (bonf[i] && !holm[i]) {
        pass = false;
        detail = "bonferroni not within holm";
      }
      if (holm[i] && !bh[i]) {
        pass = false;
        detail = "holm not within bh";
      }
    }

    // Permutation invariance: deterministic rotation of the vector.
    std::vector<double> rotated(p.begin() + static_cast<long>(m / 2), p.end());
    rotated.insert(rotated.end(), p.begin(), p.begin() + static_cast<long>(m / 2));
    const auto holm_rot = kernel::reject_holm(rotated, alpha);
    for (std::size_t i = 0; i < m && pass; ++i) {
      if (holm[(i + m / 2) % m] != holm_rot[i]) {
        pass = false;
        detail = "holm decisions depend on input order";
      }
    }

    // Stop-rule shape in rank order: holm rejects a prefix, bh rejects a
    // prefix of the ascending order (equivalently retains a suffix).
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
    bool holm_blocked = false;
    bool bh_blocked = false;
    for (std::size_t r = 0; r < m && pass; ++r) {
      if (!holm[order[r]]) holm_blocked = true;
      if (holm_blocked && holm[order[r]]) {
        pass = false;
        detail = "holm rejected after a retention";
      }
      if (!bh[order[r]]) bh_blocked = true;
      if (bh_blocked && bh[order[r]]) {
        pass = false;
        detail = "bh rejected above a retention";
      }
    }
    checked += m;
  }
  report_line(10, "10000 random p-vectors: equivalence, containment, invariance, stop shape",
              pass, pass ? fmt("%llu hypotheses checked", static_cast<unsigned long long>(checked))
                         : detail);
}

// --- criterion 11: special functions vs quadrature ------------------------

void criterion_11() {
  const int dfs[] = {1, 2, 5, 30, 120};
  double worst_sf = 0.0;
  for (int d1 : dfs) {
    for (int d2 : dfs) {
      for (int i = 0; i < 100; ++i) {
        const double f = 0.01 * std::pow(20.0 / 0.01, i / 99.0);
        const double mine = f_sf(f, d1, d2);
        const double oracle = 1.0 - test::f_cdf_quadrature(f, d1, d2);
        worst_sf = std::max(worst_sf, std::fabs(mine - oracle));
      }
    }
  }

  Xoshiro256pp rng(57721);
  double worst_reflect = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.uniform01();
    const double a = 0.1 + 49.9 * rng.uniform01();
    const double b = 0.1 + 49.9 * rng.uniform01();
    worst_reflect = std::max(
        worst_reflect, std::fabs(reg_inc_beta(x, a, b) + reg_inc_beta(1.0 - x, b, a) - 1.0));
  }
  const bool pass = worst_sf <= 1e-8 && worst_reflect <= 1e-12;
  report_line(11, "f_sf vs quadrature <= 1e-8 on the grid; beta reflection <= 1e-12", pass,
              fmt("worst: sf %.2e, reflection %.2e", worst_sf, worst_reflect));
}

// --- criterion 12: bitwise determinism across worker counts ---------------

bool bitwise_equal(const SimResult& a, const SimResult& b) {
  if (a.replications != b.replications || a.seed != b.seed || a.redraws != b.redraws) return false;
  if (a.methods.size() != b.methods.size()) return false;
  for (std::size_t i = 0; i < a.methods.size(); ++i) {
    const MethodResult& ma = a.methods[i];
    const MethodResult& mb = b.methods[i];
    if (ma.tally.any_false_rejection != mb.tally.any_false_rejection ||
        ma.tally.vr_counts != mb.tally.vr_counts ||
        ma.tally.effect_rejections != mb.tally.effect_rejections ||
        ma.fwer_hat != mb.fwer_hat || ma.fwer_se != mb.fwer_se || ma.fdr_hat != mb.fdr_hat ||
        ma.effect_rejection_rate != mb.effect_rejection_rate) {
      return false;
    }
  }
  return true;
}

void criterion_12() {
  const SimConfig config = SimConfig::all_null(
      Design({{"G", 2}, {"E", 3}}, 6), 1.0, 0.05,
      {Method::none, Method::holm, Method::bh, Method::omnibus_gate}, 20000, kSeed);
  const SimResult one = simulate(config, 1);
  const SimResult three = simulate(config, 3);
  const SimResult five = simulate(config, 5);
  const bool pass = bitwise_equal(one, three) && bitwise_equal(one, five);
  report_line(12, "identical SimResult for 1, 3, and 5 workers", pass,
              fmt("fwer(none) %.5f", one.methods[0].fwer_hat));
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  const SimResult allnull6 = allnull_2x3(6, 200000);
  criterion_4(allnull6);
  criterion_5();
  criterion_6(allnull6);
  criterion_7(allnull6);
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  criterion_12();

  if (g_failures > 0) {
    std::printf("%d criterion(s) FAILED\n", g_failures);
    return 1;
  }
  std::printf("all acceptance criteria passed\n");
  return 0;
}
