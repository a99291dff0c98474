#ifndef CCAE_SPECIAL_FUNCTIONS_HPP
#define CCAE_SPECIAL_FUNCTIONS_HPP

namespace ccae {

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
/// Series expansion for x < a+1, Lentz continued fraction otherwise;
/// absolute error below 1e-12 over the tested domain.
double gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

/// Upper tail of the chi-square distribution with df degrees of freedom.
double chi_square_sf(double x, unsigned df);

/// Upper tail of the standard normal distribution.
double normal_sf(double z);

} // namespace ccae

#endif
