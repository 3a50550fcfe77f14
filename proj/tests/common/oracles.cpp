#include "oracles.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace multiway::test {

namespace {

// Helmert contrast column h (1-based, h in 1..L-1) evaluated at level i:
// +1 below the pivot, -h at the pivot, 0 above. Columns are mutually
// orthogonal and orthogonal to the constant.
double helmert(int h, int i) {
  if (i < h) return 1.0;
  if (i == h) return -static_cast<double>(h);
  return 0.0;
}

std::vector<int> cell_coordinates(const Design& design, std::int64_t cell) {
  const int k = design.factor_count();
  std::vector<int> coord(static_cast<std::size_t>(k));
  for (int j = k - 1; j >= 0; --j) {
    coord[static_cast<std::size_t>(j)] = static_cast<int>(cell % design.levels(j));
    cell /= design.levels(j);
  }
  return coord;
}

}  // namespace

double projection_ss(const Design& design, std::span<const double> responses, EffectId effect) {
  const int n = design.n_per_cell();
  const std::int64_t cells = design.cell_count();
  const std::vector<int> members = effect.members();

  // One contrast-column choice per member factor; iterate all combinations.
  std::vector<int> choice(members.size(), 1);
  double ss = 0.0;
  while (true) {
    double dot = 0.0;
    double norm2 = 0.0;
    for (std::int64_t c = 0; c < cells; ++c) {
      const std::vector<int> coord = cell_coordinates(design, c);
      double v = 1.0;
      for (std::size_t t = 0; t < members.size(); ++t) {
        v *= helmert(choice[t], coord[static_cast<std::size_t>(members[t])]);
      }
      for (int i = 0; i < n; ++i) {
        dot += v * responses[static_cast<std::size_t>(c * n + i)];
        norm2 += v * v;
      }
    }
    ss += dot * dot / norm2;

    std::size_t t = members.size();
    while (t-- > 0) {
      if (++choice[t] <= design.levels(members[t]) - 1) break;
      choice[t] = 1;
      if (t == 0) return ss;
    }
  }
}

double oneway_over_cells_f(const Design& design, std::span<const double> responses) {
  const int n = design.n_per_cell();
  const std::int64_t cells = design.cell_count();
  const auto N = static_cast<double>(design.total_n());

  double grand = 0.0;
  for (double y : responses) grand += y;
  grand /= N;

  double between = 0.0;
  double within = 0.0;
  for (std::int64_t c = 0; c < cells; ++c) {
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += responses[static_cast<std::size_t>(c * n + i)];
    mean /= n;
    between += n * (mean - grand) * (mean - grand);
    for (int i = 0; i < n; ++i) {
      const double e = responses[static_cast<std::size_t>(c * n + i)] - mean;
      within += e * e;
    }
  }
  const double df1 = static_cast<double>(cells) - 1.0;
  const double df2 = N - static_cast<double>(cells);
  return (between / df1) / (within / df2);
}

namespace {

double adaptive_simpson(const std::function<double(double)>& g, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = g(lm);
  const double frm = g(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson(g, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         adaptive_simpson(g, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

}  // namespace

double f_cdf_quadrature(double f, int df1, int df2) {
  if (f <= 0.0) return 0.0;
  const double d1 = df1;
  const double d2 = df2;
  const double log_beta =
      std::lgamma(d1 / 2.0) + std::lgamma(d2 / 2.0) - std::lgamma((d1 + d2) / 2.0);

  // CDF(f) = int_0^sqrt(f) 2 u^(d1-1) (d1/d2)^(d1/2) (1 + d1 u^2/d2)^-((d1+d2)/2) / B du
  const auto integrand = [&](double u) {
    if (u == 0.0) return d1 == 1.0 ? 2.0 * std::exp(0.5 * std::log(d1 / d2) - log_beta) : 0.0;
    const double log_g = std::log(2.0) + (d1 - 1.0) * std::log(u) +
                         (d1 / 2.0) * std::log(d1 / d2) -
                         ((d1 + d2) / 2.0) * std::log1p(d1 * u * u / d2) - log_beta;
    return std::exp(log_g);
  };

  const double a = 0.0;
  const double b = std::sqrt(f);
  const double fa = integrand(a);
  const double fb = integrand(b);
  const double fm = integrand(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(integrand, a, b, fa, fm, fb, whole, 1e-12, 60);
}

}  // namespace multiway::test
