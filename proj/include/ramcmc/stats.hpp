#pragma once

#include <vector>

namespace ramcmc {

/// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);

/// Chi-squared CDF with dof degrees of freedom.
double chi_squared_cdf(double x, double dof);

/// Inverse chi-squared CDF; p in (0, 1).
double chi_squared_quantile(double p, double dof);

/// Linear-interpolation quantile of a sample (type-7); q in [0, 1].
double sample_quantile(std::vector<double> values, double q);

double median(std::vector<double> values);

}  // namespace ramcmc
