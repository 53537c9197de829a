#include "subpen/subordinator.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "subpen/special.hpp"

namespace subpen {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void bad_law(const std::string& msg) {
  throw std::invalid_argument("SubordinatorLaw: " + msg);
}

// Series part of the PG(t/xi, gamma, rho) density at eta > 0, evaluated in
// log space with log-Gamma terms. The summand is unimodal in k; summation
// stops once past the mode with a term below 1e-17 of the running sum.
double pg_continuous_density(double t, double xi, double gamma, double rho, double eta) {
  const double c1 = (rho + 1.0) * std::log(rho + 1.0) + std::log(t / xi) - std::log(rho);
  const double leg = std::log(eta / gamma);
  double max_lt = -kInf;
  double sum = 0.0;  // sum of exp(lt - max_lt)
  double prev_lt = -kInf;
  for (long k = 1; k <= 200000; ++k) {
    const double lt = k * c1 + k * rho * leg - std::lgamma(k + 1.0) -
                      std::lgamma(k * rho) - std::log(eta);
    if (lt > max_lt) {
      sum = sum * std::exp(max_lt - lt) + 1.0;
      max_lt = lt;
    } else {
      const double rel = std::exp(lt - max_lt);
      sum += rel;
      if (lt < prev_lt && rel < 1e-17 * sum) break;
    }
    prev_lt = lt;
  }
  const double log_f = -(rho + 1.0) * t / (rho * xi) - (rho + 1.0) * eta / gamma +
                       max_lt + std::log(sum);
  return std::exp(log_f);
}

// Continuous part of SB(t/xi, gamma): the exponent collapses to
// -(sqrt(t/xi) - sqrt(eta/gamma))^2 once I_1 is written in scaled form.
double sb_continuous_density(double t, double xi, double gamma, double eta) {
  const double a = std::sqrt(t / xi);
  const double b = std::sqrt(eta / gamma);
  const double z = 2.0 * a * b;
  const double d = a - b;
  return std::exp(-d * d) * a * bessel_i1_scaled(z) / (gamma * b);
}

double poisson_log_pmf(double mean, long k) {
  return k * std::log(mean) - mean - std::lgamma(static_cast<double>(k) + 1.0);
}

// Index on the lattice {k * spacing} or -1 if eta is off the grid.
long lattice_index(double eta, double spacing) {
  const double k = std::round(eta / spacing);
  if (std::abs(eta - k * spacing) <= 1e-9 * std::max(spacing, eta)) return static_cast<long>(k);
  return -1;
}

// sum_k coef * x^k / k * (1 - exp(-s k spacing)) for 0 < x < 1, stopping on
// a geometric tail bound.
double atomic_levy_sum(double coef, double x, double spacing, double s) {
  double sum = 0.0;
  double xk = 1.0;
  for (long k = 1; k <= 5000000; ++k) {
    xk *= x;
    sum += coef * xk / static_cast<double>(k) * (-std::expm1(-s * spacing * k));
    const double tail = coef * xk * x / ((1.0 - x) * (k + 1.0));
    if (tail < 1e-17 * sum + 1e-300) break;
  }
  return sum;
}

template <class F>
double levy_quadrature(F&& integrand) {
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate(integrand, 1e-12);
}

double ks_distance_vs_gamma(std::vector<double>& x, double shape) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double cdf = gamma_cdf(shape, 1.0, x[i]);
    ks = std::max(ks, std::max(cdf - i / n, (i + 1) / n - cdf));
  }
  return ks;
}

}  // namespace

std::string_view law_kind_name(LawKind k) {
  switch (k) {
    case LawKind::Gamma: return "GAMMA";
    case LawKind::PoissonScaled: return "POISSON";
    case LawKind::Pg: return "PG";
    case LawKind::Nb: return "NB";
    case LawKind::SqBessel: return "SQBESSEL";
  }
  bad_law("unknown kind enum");
}

LawKind law_kind_from_string(std::string_view name) {
  std::string up(name);
  std::transform(up.begin(), up.end(), up.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (up == "GAMMA") return LawKind::Gamma;
  if (up == "POISSON") return LawKind::PoissonScaled;
  if (up == "PG") return LawKind::Pg;
  if (up == "NB") return LawKind::Nb;
  if (up == "SQBESSEL" || up == "SB") return LawKind::SqBessel;
  bad_law("unknown kind '" + std::string(name) + "'");
}

SubordinatorLaw::SubordinatorLaw(LawKind k, double t_, double xi_, double gamma_)
    : kind(k), t(t_), xi(xi_), gamma(gamma_), rho(0.0) {
  validate();
}

SubordinatorLaw::SubordinatorLaw(LawKind k, double t_, double xi_, double gamma_, double rho_)
    : kind(k), t(t_), xi(xi_), gamma(gamma_), rho(rho_) {
  validate();
}

void SubordinatorLaw::validate() const {
  if (!std::isfinite(t) || t < 0.0) bad_law("t must be a nonnegative finite real");
  if (!std::isfinite(xi) || xi <= 0.0) bad_law("xi must be positive");
  if (!std::isfinite(gamma) || gamma <= 0.0) bad_law("gamma must be positive");
  if (uses_rho()) {
    if (!std::isfinite(rho) || rho <= 0.0) bad_law("rho must be positive for PG/NB");
  } else if (rho != 0.0) {
    bad_law("rho is only valid for the PG/NB kinds");
  }
}

PenaltySpec SubordinatorLaw::exponent() const {
  switch (kind) {
    case LawKind::Gamma: return PenaltySpec(Family::Log, xi, gamma);
    case LawKind::PoissonScaled: return PenaltySpec(Family::Exp, xi, gamma);
    case LawKind::Pg: return PenaltySpec(Family::Pg, xi, gamma, rho);
    case LawKind::Nb: return PenaltySpec(Family::Cel, xi, gamma, rho);
    case LawKind::SqBessel: return PenaltySpec(Family::Lfr, xi, gamma);
  }
  bad_law("unknown kind enum");
}

DensityValue density(const SubordinatorLaw& law, double eta) {
  law.validate();
  if (std::isnan(eta) || eta < 0.0) throw std::domain_error("density: eta must be nonnegative");
  if (law.t == 0.0) return {1.0, 0.0};  // T(0) = 0
  switch (law.kind) {
    case LawKind::Gamma: {
      const double shape = law.t / law.xi;
      if (eta == 0.0) {
        if (shape < 1.0) return {0.0, kInf};
        if (shape == 1.0) return {0.0, 1.0 / law.gamma};
        return {0.0, 0.0};
      }
      const double log_pdf = (shape - 1.0) * std::log(eta) - eta / law.gamma -
                             std::lgamma(shape) - shape * std::log(law.gamma);
      return {0.0, std::exp(log_pdf)};
    }
    case LawKind::PoissonScaled: {
      const double mean = law.t / law.xi;
      const double atom = std::exp(-mean);
      const long k = lattice_index(eta, law.gamma);
      if (k < 0) return {atom, 0.0};
      return {atom, std::exp(poisson_log_pmf(mean, k))};
    }
    case LawKind::Pg: {
      const double atom = std::exp(-(law.rho + 1.0) * law.t / (law.rho * law.xi));
      if (eta == 0.0) return {atom, 0.0};
      return {atom, pg_continuous_density(law.t, law.xi, law.gamma, law.rho, eta)};
    }
    case LawKind::Nb: {
      const double r = (law.rho + 1.0) * law.t / law.xi;
      const double spacing = law.rho * law.gamma / (law.rho + 1.0);
      const double logq = std::log(law.rho) - std::log1p(law.rho);
      const double log1mq = -std::log1p(law.rho);
      const double atom = std::exp(r * logq);
      const long k = lattice_index(eta, spacing);
      if (k < 0) return {atom, 0.0};
      const double log_pmf = std::lgamma(k + r) - std::lgamma(static_cast<double>(k) + 1.0) -
                             std::lgamma(r) + r * logq + k * log1mq;
      return {atom, std::exp(log_pmf)};
    }
    case LawKind::SqBessel: {
      const double atom = std::exp(-law.t / law.xi);
      if (eta == 0.0) return {atom, 0.0};
      return {atom, sb_continuous_density(law.t, law.xi, law.gamma, eta)};
    }
  }
  bad_law("unknown kind enum");
}

Moments moments(const SubordinatorLaw& law) {
  law.validate();
  const double mean = law.gamma * law.t / law.xi;
  double var = law.gamma * law.gamma * law.t / law.xi;
  if (law.kind == LawKind::SqBessel) var *= 2.0;  // SB(t/xi,g) = PG(t/(2xi),2g,1)
  return {mean, var};
}

double sample_one(const SubordinatorLaw& law, Rng& rng) {
  if (law.t == 0.0) return 0.0;
  switch (law.kind) {
    case LawKind::Gamma:
      return rng.gamma(law.t / law.xi, law.gamma);
    case LawKind::PoissonScaled:
      return law.gamma * static_cast<double>(rng.poisson(law.t / law.xi));
    case LawKind::Pg: {
      const long k = rng.poisson((law.rho + 1.0) * law.t / (law.rho * law.xi));
      if (k == 0) return 0.0;
      return rng.gamma(k * law.rho, law.gamma / (law.rho + 1.0));
    }
    case LawKind::Nb: {
      const double lambda = rng.gamma((law.rho + 1.0) * law.t / law.xi, 1.0 / law.rho);
      const long k = rng.poisson(lambda);
      return k * (law.rho * law.gamma / (law.rho + 1.0));
    }
    case LawKind::SqBessel: {
      const long k = rng.poisson(law.t / law.xi);
      if (k == 0) return 0.0;
      return rng.gamma(static_cast<double>(k), law.gamma);
    }
  }
  bad_law("unknown kind enum");
}

std::vector<double> sample(const SubordinatorLaw& law, std::uint64_t seed, std::size_t n) {
  law.validate();
  if (n == 0) throw std::invalid_argument("sample: n must be >= 1");
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = sample_one(law, rng);
  return out;
}

double laplace_transform(const SubordinatorLaw& law, double s) {
  law.validate();
  if (std::isnan(s) || s < 0.0)
    throw std::domain_error("laplace_transform: s must be nonnegative");
  return std::exp(-law.t * psi(law.exponent(), s));
}

double levy_exponent_residual(const PenaltySpec& spec, double s) {
  spec.validate();
  if (!(s > 0.0)) throw std::domain_error("levy_exponent_residual: s must be positive");
  const double xi = spec.xi;
  const double gamma = spec.gamma;
  double integral = 0.0;
  switch (spec.family) {
    case Family::Log:
      integral = levy_quadrature([&](double u) {
        return -std::expm1(-s * u) * std::exp(-u / gamma) / (xi * u);
      });
      break;
    case Family::Lfr:
      integral = levy_quadrature([&](double u) {
        return -std::expm1(-s * u) * std::exp(-u / gamma) / (xi * gamma);
      });
      break;
    case Family::Pg: {
      const double rho = spec.rho;
      const double logc = std::log(gamma / xi) + (rho + 1.0) * std::log((rho + 1.0) / gamma) -
                          std::lgamma(rho + 1.0);
      integral = levy_quadrature([&](double u) {
        return -std::expm1(-s * u) *
               std::exp(logc + (rho - 1.0) * std::log(u) - (rho + 1.0) * u / gamma);
      });
      break;
    }
    case Family::Exp:
      // Single atom of mass 1/xi at gamma.
      integral = -std::expm1(-s * gamma) / xi;
      break;
    case Family::Cel1:
      integral = atomic_levy_sum(1.0 / xi, 0.5, gamma, s);
      break;
    case Family::Cel: {
      const double rho = spec.rho;
      integral = atomic_levy_sum((rho + 1.0) / xi, 1.0 / (1.0 + rho),
                                 rho * gamma / (rho + 1.0), s);
      break;
    }
    case Family::LHalf:
      throw std::invalid_argument("levy_exponent_residual: LHALF has no implemented Levy measure");
  }
  return std::abs(integral - psi(spec, s));
}

std::vector<double> gamma_limit_check(LawKind kind, double t,
                                      std::span<const double> gammas, double rho,
                                      double eps, std::size_t n, std::uint64_t seed) {
  if (kind != LawKind::Pg && kind != LawKind::Nb)
    throw std::invalid_argument("gamma_limit_check: kind must be PG or NB");
  if (!(eps > 0.0)) throw std::invalid_argument("gamma_limit_check: eps must be positive");
  if (n == 0) throw std::invalid_argument("gamma_limit_check: n must be >= 1");
  std::vector<double> out;
  out.reserve(gammas.size());
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    const double g = gammas[i];
    if (t == 0.0) {
      out.push_back(0.0);  // T(0) = 0 exactly
      continue;
    }
    const SubordinatorLaw law(kind, t, g, g, rho);
    Rng rng(substream_seed(seed, i));
    std::size_t exceed = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (std::abs(sample_one(law, rng) - t) >= eps) ++exceed;
    out.push_back(static_cast<double>(exceed) / static_cast<double>(n));
  }
  return out;
}

std::vector<double> nb_to_gamma_ks(double r, std::span<const double> p_seq,
                                   std::size_t n, std::uint64_t seed) {
  if (!(r > 0.0)) throw std::invalid_argument("nb_to_gamma_ks: r must be positive");
  if (n == 0) throw std::invalid_argument("nb_to_gamma_ks: n must be >= 1");
  std::vector<double> out;
  out.reserve(p_seq.size());
  for (std::size_t i = 0; i < p_seq.size(); ++i) {
    const double p = p_seq[i];
    if (!(p > 0.0 && p < 1.0))
      throw std::invalid_argument("nb_to_gamma_ks: p must lie in (0, 1)");
    Rng rng(substream_seed(seed, i));
    std::vector<double> scaled(n);
    for (auto& v : scaled) {
      // NB(r, p) as a Gamma-mixed Poisson with scale (1-p)/p.
      const double lambda = rng.gamma(r, (1.0 - p) / p);
      v = p * static_cast<double>(rng.poisson(lambda));
    }
    out.push_back(ks_distance_vs_gamma(scaled, r));
  }
  return out;
}

}  // namespace subpen
