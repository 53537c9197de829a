#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace subpen {

// Penalty families. LOG, EXP, LFR and CEL1 are the four fixed table rows;
// PG and CEL are the interpolating families with a free rho; LHALF is the
// l_{1/2} comparison penalty s -> sqrt(s).
enum class Family { Log, Exp, Lfr, Cel1, Pg, Cel, LHalf };

std::string_view family_name(Family f);
Family family_from_string(std::string_view name);  // case-insensitive

// A Bernstein penalty Psi(s) with scale xi > 0, shape gamma > 0 and, for the
// PG/CEL families, an interpolation parameter rho > 0. rho = 0 and
// rho = +inf are rejected; select the LOG/EXP families instead.
struct PenaltySpec {
  Family family = Family::Log;
  double xi = 1.0;
  double gamma = 1.0;
  double rho = 0.0;  // meaningful only for PG/CEL

  PenaltySpec() = default;
  PenaltySpec(Family f, double xi_, double gamma_);
  PenaltySpec(Family f, double xi_, double gamma_, double rho_);

  bool uses_rho() const { return family == Family::Pg || family == Family::Cel; }
  void validate() const;  // throws std::invalid_argument

  // Canonical text form FAMILY(xi=...,gamma=...[,rho=...]).
  std::string to_string() const;
  static PenaltySpec parse(std::string_view text);
};

// The table's LFR(xi, gamma) row is Psi_rho at rho = 1 after replacing
// gamma/2, xi/2 by gamma, xi; these helpers perform that reparametrization,
// mapping LFR(xi, gamma) to PG(2 xi, 2 gamma, 1) and likewise for CEL1.
PenaltySpec lfr_as_pg(double xi, double gamma);
PenaltySpec cel1_as_cel(double xi, double gamma);

// Psi(s) for s >= 0. Psi(0) = 0 for every family.
double psi(const PenaltySpec& spec, double s);

// dPsi/ds. Defined for s >= 0 except LHALF, which requires s > 0; the other
// families extend continuously to s = 0 with Psi'(0+) = gamma/xi.
double psi_prime(const PenaltySpec& spec, double s);

// Pointwise chain CEL1 < LFR < EXP < LOG < s, strict at every grid point,
// with xi = gamma for all four fixed families.
bool check_ordering(double gamma, std::span<const double> grid);

// sup over the grid of |Psi_rho(s) - target(s)| (family PG) or
// |Phi_rho(s) - target(s)| (family CEL), target LOG or EXP, same (xi, gamma).
double limit_residual(Family family, Family target, double rho, double xi,
                      double gamma, std::span<const double> grid);

// n geometrically spaced points covering [lo, hi], endpoints included.
std::vector<double> log_grid(double lo, double hi, int n);

}  // namespace subpen
