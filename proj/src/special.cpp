#include "subpen/special.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace subpen {

double bessel_i1_scaled(double z) {
  if (std::isnan(z) || z < 0.0) throw std::domain_error("bessel_i1_scaled: z must be >= 0");
  if (z < 20.0) {
    // I_1(z) = sum_m (z/2)^{2m+1} / (m! (m+1)!)
    const double q = 0.25 * z * z;
    double term = 0.5 * z;
    double sum = term;
    for (int m = 1; m < 200; ++m) {
      term *= q / (static_cast<double>(m) * (m + 1.0));
      sum += term;
      if (term < 1e-18 * sum) break;
    }
    return sum * std::exp(-z);
  }
  // I_1(z) ~ e^z / sqrt(2 pi z) * sum_k c_k, c_0 = 1,
  // c_k = -c_{k-1} (4 - (2k-1)^2) / (8 k z). Truncated at the smallest term.
  double c = 1.0;
  double sum = 1.0;
  double prev = std::abs(c);
  for (int k = 1; k < 40; ++k) {
    const double odd = 2.0 * k - 1.0;
    c *= -(4.0 - odd * odd) / (8.0 * k * z);
    if (std::abs(c) > prev) break;  // asymptotic series started diverging
    sum += c;
    prev = std::abs(c);
    if (std::abs(c) < 1e-18 * std::abs(sum)) break;
  }
  return sum / std::sqrt(2.0 * M_PI * z);
}

double gamma_cdf(double shape, double scale, double x) {
  if (!(shape > 0.0) || !(scale > 0.0))
    throw std::invalid_argument("gamma_cdf: shape and scale must be positive");
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_p(shape, x / scale);
}

double chi_squared_quantile(double df, double prob) {
  boost::math::chi_squared dist(df);
  return boost::math::quantile(dist, prob);
}

}  // namespace subpen
