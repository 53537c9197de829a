#pragma once

namespace subpen {

// exp(-z) * I_1(z) for z >= 0. Power series below z = 20, asymptotic
// expansion above; the two branches agree to ~1e-11 at the switch point.
double bessel_i1_scaled(double z);

// Regularized lower incomplete gamma, i.e. the Gamma(shape, scale) CDF.
double gamma_cdf(double shape, double scale, double x);

// Quantile of the chi-squared distribution with df degrees of freedom.
double chi_squared_quantile(double df, double prob);

}  // namespace subpen
