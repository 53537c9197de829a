#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "subpen/penalty.hpp"
#include "subpen/rng.hpp"

namespace subpen {

// Law of T(t) per penalty family, matching the table's subordinator column:
//   GAMMA          Ga(t/xi, gamma)
//   POISSON_SCALED CoP(t/xi, delta_gamma), i.e. gamma * Po(t/xi)
//   PG             PG(t/xi, gamma, rho)
//   NB             NoB((rho+1)t/xi, rho/(rho+1), atoms at k rho gamma/(rho+1))
//   SQ_BESSEL      SB(t/xi, gamma), the LFR row; identical to PG(t/(2xi), 2gamma, 1)
enum class LawKind { Gamma, PoissonScaled, Pg, Nb, SqBessel };

std::string_view law_kind_name(LawKind k);
LawKind law_kind_from_string(std::string_view name);  // case-insensitive

struct SubordinatorLaw {
  LawKind kind = LawKind::Gamma;
  double t = 1.0;
  double xi = 1.0;
  double gamma = 1.0;
  double rho = 0.0;  // meaningful only for PG/NB

  SubordinatorLaw() = default;
  SubordinatorLaw(LawKind k, double t_, double xi_, double gamma_);
  SubordinatorLaw(LawKind k, double t_, double xi_, double gamma_, double rho_);

  bool uses_rho() const { return kind == LawKind::Pg || kind == LawKind::Nb; }
  void validate() const;

  // The Laplace exponent of this law as a PenaltySpec, so that
  // E exp(-s T(t)) = exp(-t Psi(s)).
  PenaltySpec exponent() const;
};

struct DensityValue {
  double atom;     // Pr(T(t) = 0)
  double density;  // continuous pdf, or pmf at eta for the discrete laws
};

// Density/pmf evaluation at eta >= 0. For eta = 0 the mass is reported in
// `atom` and `density` is the k = 0 pmf (discrete) or 0 (laws with a Dirac
// atom); the plain Gamma law reports its pdf value. Discrete laws return
// pmf 0 off their support grid.
DensityValue density(const SubordinatorLaw& law, double eta);

struct Moments {
  double mean;
  double variance;
};

// Closed-form moments. GAMMA/POISSON_SCALED/PG/NB have mean gamma t/xi and
// variance gamma^2 t/xi; SQ_BESSEL (the reparametrized LFR row) has the same
// mean but variance 2 gamma^2 t/xi, since SB(t/xi,gamma) = PG(t/(2xi),2gamma,1).
Moments moments(const SubordinatorLaw& law);

double sample_one(const SubordinatorLaw& law, Rng& rng);
std::vector<double> sample(const SubordinatorLaw& law, std::uint64_t seed, std::size_t n);

// exp(-t Psi(s)) via the matching Laplace exponent; equals 1 at s = 0.
double laplace_transform(const SubordinatorLaw& law, double s);

// |integral of (1 - e^{-s u}) against the family's Levy measure - Psi(s)|,
// by adaptive quadrature (continuous measures) or series summation to a
// machine-size tail (atomic measures). Defined for every family but LHALF.
double levy_exponent_residual(const PenaltySpec& spec, double s);

// Empirical Pr(|T(t) - t| >= eps) for each gamma in the list, with xi set
// equal to gamma (the convergence-in-probability regime as gamma -> 0).
std::vector<double> gamma_limit_check(LawKind kind, double t,
                                      std::span<const double> gammas, double rho,
                                      double eps, std::size_t n, std::uint64_t seed);

// Kolmogorov-Smirnov distance between p * NB(r, p) samples and the
// Gamma(r, 1) CDF, one entry per p. NB(r, p) has pmf
// Gamma(k+r)/(k! Gamma(r)) p^r (1-p)^k on the nonnegative integers.
std::vector<double> nb_to_gamma_ks(double r, std::span<const double> p_seq,
                                   std::size_t n, std::uint64_t seed);

}  // namespace subpen
