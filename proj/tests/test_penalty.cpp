#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "subpen/penalty.hpp"

using namespace subpen;

namespace {

const std::vector<PenaltySpec> kAllSpecs = {
    PenaltySpec(Family::Log, 1.0, 1.0),      PenaltySpec(Family::Exp, 0.5, 2.0),
    PenaltySpec(Family::Lfr, 2.0, 0.5),      PenaltySpec(Family::Cel1, 1.0, 2.0),
    PenaltySpec(Family::Pg, 1.0, 1.0, 0.01), PenaltySpec(Family::Pg, 2.0, 0.5, 100.0),
    PenaltySpec(Family::Cel, 1.0, 1.0, 1.0), PenaltySpec(Family::Cel, 0.5, 2.0, 7.0),
    PenaltySpec(Family::LHalf, 1.0, 1.0),
};

double central_diff(const PenaltySpec& spec, double s) {
  const double h = s * 6e-6;
  return (psi(spec, s + h) - psi(spec, s - h)) / (2.0 * h);
}

}  // namespace

TEST_CASE("psi vanishes at the origin for every family") {
  for (const auto& spec : kAllSpecs) CHECK(psi(spec, 0.0) == 0.0);
}

TEST_CASE("closed-form spot values") {
  CHECK(psi(PenaltySpec(Family::Log, 1, 1), 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(psi(PenaltySpec(Family::Lfr, 1, 1), 1.0) == doctest::Approx(0.5).epsilon(1e-14));
  // EXP saturates at 1/xi
  CHECK(psi(PenaltySpec(Family::Exp, 1, 1), 1e6) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(psi(PenaltySpec(Family::Cel1, 1, 1), 1.0) ==
        doctest::Approx(std::log(2.0 - std::exp(-1.0))).epsilon(1e-14));
  CHECK(psi(PenaltySpec(Family::LHalf, 1, 1), 4.0) == doctest::Approx(2.0));
}

TEST_CASE("PG at rho=1 reproduces the LFR closed form after the documented reparametrization") {
  const PenaltySpec lfr(Family::Lfr, 1.3, 0.8);
  const PenaltySpec pg = lfr_as_pg(1.3, 0.8);
  for (double s : log_grid(1e-3, 50.0, 40))
    CHECK(psi(pg, s) == doctest::Approx(psi(lfr, s)).epsilon(1e-12));
  CHECK(psi(lfr_as_pg(1, 1), 1.0) == doctest::Approx(0.5).epsilon(1e-13));

  const PenaltySpec cel1(Family::Cel1, 0.6, 1.4);
  const PenaltySpec cel = cel1_as_cel(0.6, 1.4);
  for (double s : log_grid(1e-3, 50.0, 40))
    CHECK(psi(cel, s) == doctest::Approx(psi(cel1, s)).epsilon(1e-12));
}

TEST_CASE("psi_prime closed forms and the slope at the origin") {
  CHECK(psi_prime(PenaltySpec(Family::Log, 1, 1), 1.0) == doctest::Approx(0.5).epsilon(1e-14));
  // lim_{s->0} Phi'_rho(s) = gamma/xi
  CHECK(psi_prime(PenaltySpec(Family::Cel, 1, 1, 1.0), 1e-12) ==
        doctest::Approx(1.0).epsilon(1e-6));
  for (const auto& spec : kAllSpecs) {
    if (spec.family == Family::LHalf) continue;
    CHECK(psi_prime(spec, 0.0) == doctest::Approx(spec.gamma / spec.xi).epsilon(1e-14));
  }
}

TEST_CASE("psi_prime matches central finite differences of psi") {
  for (const auto& spec : kAllSpecs) {
    for (double s : log_grid(1e-3, 10.0, 25)) {
      const double fd = central_diff(spec, s);
      CHECK(psi_prime(spec, s) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("psi is nondecreasing and concave; psi_prime positive and nonincreasing") {
  const auto grid = log_grid(1e-4, 100.0, 60);
  for (const auto& spec : kAllSpecs) {
    double prev_slope = std::numeric_limits<double>::infinity();
    double prev_prime = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      const double slope = (psi(spec, grid[i + 1]) - psi(spec, grid[i])) /
                           (grid[i + 1] - grid[i]);
      CHECK(slope >= -1e-12);
      CHECK(slope <= prev_slope + 1e-12);
      prev_slope = slope;
      const double prime = psi_prime(spec, grid[i]);
      CHECK(prime > 0.0);
      CHECK(prime <= prev_prime * (1.0 + 1e-12));
      prev_prime = prime;
    }
  }
}

TEST_CASE("psi grows sublinearly: psi(S)/S below 1e-3 at S=1e6") {
  for (const auto& spec : kAllSpecs) CHECK(psi(spec, 1e6) / 1e6 < 1e-3);
}

TEST_CASE("ordering chain CEL1 < LFR < EXP < LOG < s") {
  const auto grid = log_grid(1e-3, 10.0, 100);
  for (double g : {0.5, 1.0, 2.0}) CHECK(check_ordering(g, grid));
  SUBCASE("equality only at s = 0") {
    for (double g : {0.5, 1.0, 2.0}) {
      CHECK(psi(PenaltySpec(Family::Cel1, g, g), 0.0) == 0.0);
      CHECK(psi(PenaltySpec(Family::Lfr, g, g), 0.0) == 0.0);
      CHECK(psi(PenaltySpec(Family::Exp, g, g), 0.0) == 0.0);
      CHECK(psi(PenaltySpec(Family::Log, g, g), 0.0) == 0.0);
    }
  }
  SUBCASE("spot grids from the small cases") {
    const std::vector<double> g1{0.1, 1.0, 10.0};
    CHECK(check_ordering(1.0, g1));
    const std::vector<double> g2{0.5, 5.0};
    CHECK(check_ordering(2.0, g2));
  }
}

TEST_CASE("PG and CEL approach LOG and EXP in their rho limits") {
  const auto grid = log_grid(1e-2, 10.0, 50);
  CHECK(limit_residual(Family::Pg, Family::Log, 1e-7, 1, 1, grid) < 1e-4);
  CHECK(limit_residual(Family::Pg, Family::Exp, 1e7, 1, 1, grid) < 1e-4);
  CHECK(limit_residual(Family::Cel, Family::Log, 1e-7, 1, 1, grid) < 1e-4);
  CHECK(limit_residual(Family::Cel, Family::Exp, 1e7, 1, 1, grid) < 1e-4);
  // convergence, not monotonicity: rho=1 sits far from the LOG limit
  CHECK(limit_residual(Family::Pg, Family::Log, 1.0, 1, 1, grid) >
        limit_residual(Family::Pg, Family::Log, 1e-3, 1, 1, grid));
}

TEST_CASE("domain and parameter validation") {
  const PenaltySpec log_pen(Family::Log, 1, 1);
  CHECK_THROWS_AS(psi(log_pen, -0.1), std::domain_error);
  CHECK_THROWS_AS(psi_prime(log_pen, -0.1), std::domain_error);
  CHECK_THROWS_AS(psi_prime(PenaltySpec(Family::LHalf, 1, 1), 0.0), std::domain_error);
  CHECK_THROWS_AS(PenaltySpec(Family::Log, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(PenaltySpec(Family::Log, 1.0, -2.0), std::invalid_argument);
  CHECK_THROWS_AS(PenaltySpec(Family::Pg, 1.0, 1.0), std::invalid_argument);   // rho required
  CHECK_THROWS_AS(PenaltySpec(Family::Log, 1.0, 1.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(PenaltySpec(Family::Pg, 1.0, 1.0, 0.0), std::invalid_argument);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(PenaltySpec(Family::Cel, 1.0, 1.0, inf), std::invalid_argument);
}

TEST_CASE("canonical text form round-trips") {
  for (const auto& spec : kAllSpecs) {
    const PenaltySpec parsed = PenaltySpec::parse(spec.to_string());
    CHECK(parsed.family == spec.family);
    CHECK(parsed.xi == spec.xi);
    CHECK(parsed.gamma == spec.gamma);
    if (spec.uses_rho()) CHECK(parsed.rho == spec.rho);
  }
  const PenaltySpec p = PenaltySpec::parse(" log( GAMMA=2 , xi=0.25 ) ");
  CHECK(p.family == Family::Log);
  CHECK(p.xi == 0.25);
  CHECK(p.gamma == 2.0);
  CHECK(PenaltySpec::parse("PG(xi=1,gamma=1,rho=2)").to_string() == "PG(xi=1,gamma=1,rho=2)");

  CHECK_THROWS_AS(PenaltySpec::parse("LOG(xi=1)"), std::invalid_argument);
  CHECK_THROWS_AS(PenaltySpec::parse("LOG(xi=1,gamma=1,zeta=3)"), std::invalid_argument);
  CHECK_THROWS_AS(PenaltySpec::parse("NOPE(xi=1,gamma=1)"), std::invalid_argument);
  CHECK_THROWS_AS(PenaltySpec::parse("LOG(xi=1,gamma=1"), std::invalid_argument);
  CHECK_THROWS_AS(PenaltySpec::parse("LOG(xi=1,xi=2,gamma=1)"), std::invalid_argument);
}
