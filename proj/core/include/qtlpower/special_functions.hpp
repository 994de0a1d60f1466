#pragma once

namespace qtlpower {

/// ln Gamma(x) for x > 0 (Lanczos approximation, relative error ~1e-15).
double log_gamma(double x);

/// Regularized incomplete beta I_x(a, b) by continued fraction.
/// Throws DomainError for a, b <= 0 or x outside [0, 1] and NumericError when
/// the fraction fails to converge.
double reg_inc_beta(double a, double b, double x);

/// Regularized lower incomplete gamma P(a, x).
double reg_inc_gamma_lower(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), computed directly
/// in the tail so small probabilities keep their relative accuracy.
double reg_inc_gamma_upper(double a, double x);

/// Upper tail P(F > f) of the F(df1, df2) distribution.
double f_sf(double f, double df1, double df2);

/// Upper tail P(X > x) of the chi-square distribution with `df` degrees of freedom.
double chi_square_sf(double x, double df);

}  // namespace qtlpower
