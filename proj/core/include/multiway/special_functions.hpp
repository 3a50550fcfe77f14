#pragma once

#include "multiway/errors.hpp"

namespace multiway {

/// Natural log of the gamma function, x > 0. Lanczos approximation (g = 7,
/// 9 coefficients). Throws validation_error for x <= 0 or non-finite x.
double log_gamma(double x);

/// Regularized incomplete beta function I_x(a, b) for x in [0, 1], a > 0,
/// b > 0. Continued fraction (modified Lentz) with the symmetry split at
/// x = (a+1)/(a+b+2); convergence tolerance 1e-15, at most 300 iterations.
/// Throws numeric_error if the fraction fails to converge.
double reg_inc_beta(double x, double a, double b);

struct FTestInput {
  double f = 0.0;  // F statistic, >= 0
  int df1 = 1;     // numerator degrees of freedom
  int df2 = 1;     // denominator degrees of freedom
};

/// Upper-tail probability P(F_{df1,df2} > f) = I_{df2/(df2+df1*f)}(df2/2, df1/2).
double f_sf(const FTestInput& input);
double f_sf(double f, int df1, int df2);

}  // namespace multiway
