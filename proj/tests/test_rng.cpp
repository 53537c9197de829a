#include "doctest.h"

#include <cmath>
#include <vector>

#include "subpen/rng.hpp"
#include "subpen/special.hpp"

using namespace subpen;

namespace {

struct MomentStats {
  double mean;
  double var;
};

template <class F>
MomentStats sample_moments(std::size_t n, F&& draw) {
  double sum = 0.0, sumsq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = draw();
    sum += x;
    sumsq += x * x;
  }
  const double mean = sum / n;
  return {mean, sumsq / n - mean * mean};
}

double ks_vs_gamma(std::vector<double> x, double shape, double scale) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double cdf = gamma_cdf(shape, scale, x[i]);
    ks = std::max(ks, std::max(cdf - i / n, (i + 1) / n - cdf));
  }
  return ks;
}

}  // namespace

TEST_CASE("same seed reproduces the same draws") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
  Rng c(42), d(43);
  bool any_diff = false;
  for (int i = 0; i < 10; ++i) any_diff |= (c.uniform() != d.uniform());
  CHECK(any_diff);
}

TEST_CASE("substream seeds separate streams") {
  CHECK(substream_seed(1, 0) != substream_seed(1, 1));
  CHECK(substream_seed(1, 0) != substream_seed(2, 0));
  CHECK(substream_seed(7, 3) == substream_seed(7, 3));
}

TEST_CASE("uniform stays inside the open unit interval") {
  Rng rng(5);
  for (int i = 0; i < 20000; ++i) {
    const double u = rng.uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("normal moments") {
  Rng rng(11);
  const auto m = sample_moments(200000, [&] { return rng.normal(); });
  CHECK(std::abs(m.mean) < 4.0 / std::sqrt(200000.0));
  CHECK(m.var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("gamma sampler matches closed-form moments and CDF") {
  for (double shape : {0.3, 1.0, 4.7}) {
    for (double scale : {0.5, 2.0}) {
      Rng rng(1000 + static_cast<std::uint64_t>(shape * 10 + scale));
      const std::size_t n = 200000;
      const auto m = sample_moments(n, [&] { return rng.gamma(shape, scale); });
      const double mean = shape * scale;
      const double var = shape * scale * scale;
      // SE of the mean is sqrt(var/n); the variance band is wider
      CHECK(std::abs(m.mean - mean) < 5.0 * std::sqrt(var / n));
      CHECK(m.var == doctest::Approx(var).epsilon(0.05));
    }
  }
  SUBCASE("KS against the Gamma CDF") {
    for (double shape : {0.5, 3.0}) {
      Rng rng(77);
      std::vector<double> x(100000);
      for (auto& v : x) v = rng.gamma(shape, 1.0);
      CHECK(ks_vs_gamma(std::move(x), shape, 1.0) < 0.01);
    }
  }
}

TEST_CASE("poisson sampler matches moments in both regimes") {
  for (double mean : {0.3, 3.0, 50.0, 2000.0}) {
    Rng rng(900 + static_cast<std::uint64_t>(mean));
    const std::size_t n = 200000;
    const auto m = sample_moments(n, [&] { return static_cast<double>(rng.poisson(mean)); });
    CHECK(std::abs(m.mean - mean) < 5.0 * std::sqrt(mean / n));
    CHECK(m.var == doctest::Approx(mean).epsilon(0.05));
  }
  Rng rng(1);
  CHECK(rng.poisson(0.0) == 0);
}

TEST_CASE("exponential mean") {
  Rng rng(3);
  const auto m = sample_moments(100000, [&] { return rng.exponential(2.0); });
  CHECK(m.mean == doctest::Approx(2.0).epsilon(0.03));
}

TEST_CASE("special function spot values") {
  // I_1(1) and I_1(2), scaled by exp(-z)
  CHECK(bessel_i1_scaled(1.0) * std::exp(1.0) ==
        doctest::Approx(0.5651591039924850).epsilon(1e-12));
  CHECK(bessel_i1_scaled(2.0) * std::exp(2.0) ==
        doctest::Approx(1.590636854637329).epsilon(1e-12));
  // branch continuity at the series/asymptotic switch
  CHECK(bessel_i1_scaled(19.999) == doctest::Approx(bessel_i1_scaled(20.001)).epsilon(1e-8));
  CHECK(gamma_cdf(1.0, 1.0, 1.0) == doctest::Approx(-std::expm1(-1.0)).epsilon(1e-12));
  CHECK(chi_squared_quantile(2.0, 0.95) == doctest::Approx(5.991464547107979).epsilon(1e-10));
}
