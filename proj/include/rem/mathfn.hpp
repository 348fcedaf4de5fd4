#pragma once

#include <cstddef>

namespace rem {

// standard normal CDF and upper tail, accurate in both tails via erfc
double norm_cdf(double z);
double norm_sf(double z);

// inverse of the standard normal CDF, p in (0,1); accurate to ~1e-15
double norm_quantile(double p);

// regularized incomplete gamma functions P(a,x) and Q(a,x) = 1 - P(a,x)
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// survival function of the chi-square distribution with `dof` degrees
double chi_square_sf(double x, double dof);

// Kolmogorov distribution survival Q(lambda) = 2 sum (-1)^{j-1} e^{-2 j^2 lambda^2}
double kolmogorov_sf(double lambda);

// asymptotic KS p-value for statistic d at effective sample size n_eff
double ks_p_value(double d, double n_eff);

}  // namespace rem
