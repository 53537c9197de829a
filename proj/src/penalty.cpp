#include "subpen/penalty.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace subpen {

namespace {

[[noreturn]] void bad_spec(const std::string& msg) {
  throw std::invalid_argument("PenaltySpec: " + msg);
}

std::string ascii_upper(std::string_view in) {
  std::string out(in);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

// Shortest representation that round-trips through parse().
std::string format_round_trip(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text, std::string_view key) {
  double v = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    bad_spec("could not parse value '" + std::string(text) + "' for " + std::string(key));
  return v;
}

std::string_view strip(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string_view family_name(Family f) {
  switch (f) {
    case Family::Log: return "LOG";
    case Family::Exp: return "EXP";
    case Family::Lfr: return "LFR";
    case Family::Cel1: return "CEL1";
    case Family::Pg: return "PG";
    case Family::Cel: return "CEL";
    case Family::LHalf: return "LHALF";
  }
  bad_spec("unknown family enum");
}

Family family_from_string(std::string_view name) {
  const std::string up = ascii_upper(strip(name));
  if (up == "LOG") return Family::Log;
  if (up == "EXP") return Family::Exp;
  if (up == "LFR") return Family::Lfr;
  if (up == "CEL1") return Family::Cel1;
  if (up == "PG") return Family::Pg;
  if (up == "CEL") return Family::Cel;
  if (up == "LHALF") return Family::LHalf;
  bad_spec("unknown family '" + std::string(name) + "'");
}

PenaltySpec::PenaltySpec(Family f, double xi_, double gamma_)
    : family(f), xi(xi_), gamma(gamma_), rho(0.0) {
  validate();
}

PenaltySpec::PenaltySpec(Family f, double xi_, double gamma_, double rho_)
    : family(f), xi(xi_), gamma(gamma_), rho(rho_) {
  validate();
}

void PenaltySpec::validate() const {
  if (!std::isfinite(xi) || xi <= 0.0) bad_spec("xi must be a positive finite real");
  if (!std::isfinite(gamma) || gamma <= 0.0) bad_spec("gamma must be a positive finite real");
  if (uses_rho()) {
    if (!std::isfinite(rho) || rho <= 0.0)
      bad_spec("rho must be a positive finite real for PG/CEL (use LOG/EXP for the limits)");
  } else if (rho != 0.0) {
    bad_spec("rho is only valid for the PG/CEL families");
  }
}

std::string PenaltySpec::to_string() const {
  std::string out(family_name(family));
  out += "(xi=";
  out += format_round_trip(xi);
  out += ",gamma=";
  out += format_round_trip(gamma);
  if (uses_rho()) {
    out += ",rho=";
    out += format_round_trip(rho);
  }
  out += ")";
  return out;
}

PenaltySpec PenaltySpec::parse(std::string_view text) {
  std::string_view body = strip(text);
  const auto open = body.find('(');
  if (open == std::string_view::npos || body.back() != ')')
    bad_spec("expected FAMILY(xi=...,gamma=...[,rho=...]), got '" + std::string(text) + "'");
  const Family fam = family_from_string(body.substr(0, open));
  std::string_view args = body.substr(open + 1, body.size() - open - 2);

  PenaltySpec spec;
  spec.family = fam;
  bool saw_xi = false, saw_gamma = false, saw_rho = false;
  while (!args.empty()) {
    const auto comma = args.find(',');
    std::string_view item = strip(args.substr(0, comma));
    args = (comma == std::string_view::npos) ? std::string_view{} : args.substr(comma + 1);
    if (item.empty()) bad_spec("empty parameter in '" + std::string(text) + "'");
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) bad_spec("expected key=value, got '" + std::string(item) + "'");
    const std::string key = ascii_upper(strip(item.substr(0, eq)));
    std::string_view val = strip(item.substr(eq + 1));
    if (key == "XI") {
      if (saw_xi) bad_spec("duplicate xi");
      spec.xi = parse_double(val, "xi");
      saw_xi = true;
    } else if (key == "GAMMA") {
      if (saw_gamma) bad_spec("duplicate gamma");
      spec.gamma = parse_double(val, "gamma");
      saw_gamma = true;
    } else if (key == "RHO") {
      if (saw_rho) bad_spec("duplicate rho");
      spec.rho = parse_double(val, "rho");
      saw_rho = true;
    } else {
      bad_spec("unknown key '" + key + "'");
    }
  }
  if (!saw_xi || !saw_gamma) bad_spec("xi and gamma are required");
  if (spec.uses_rho() && !saw_rho) bad_spec("rho is required for PG/CEL");
  if (!spec.uses_rho() && saw_rho) bad_spec("rho is only valid for the PG/CEL families");
  spec.validate();
  return spec;
}

PenaltySpec lfr_as_pg(double xi, double gamma) {
  return PenaltySpec(Family::Pg, 2.0 * xi, 2.0 * gamma, 1.0);
}

PenaltySpec cel1_as_cel(double xi, double gamma) {
  return PenaltySpec(Family::Cel, 2.0 * xi, 2.0 * gamma, 1.0);
}

double psi(const PenaltySpec& spec, double s) {
  spec.validate();
  if (std::isnan(s) || s < 0.0) throw std::domain_error("psi: s must be nonnegative");
  switch (spec.family) {
    case Family::Log:
      return std::log1p(spec.gamma * s) / spec.xi;
    case Family::Exp:
      return -std::expm1(-spec.gamma * s) / spec.xi;
    case Family::Lfr: {
      const double gs = spec.gamma * s;
      return gs / ((gs + 1.0) * spec.xi);
    }
    case Family::Cel1:
      // log(2 - e^{-gamma s}) = log1p(1 - e^{-gamma s})
      return std::log1p(-std::expm1(-spec.gamma * s)) / spec.xi;
    case Family::Pg: {
      // (rho+1)/(rho xi) [1 - (1 + gamma s/(rho+1))^{-rho}], via expm1/log1p
      // so the rho -> 0 and rho -> inf limits stay accurate.
      const double level = std::log1p(spec.gamma * s / (spec.rho + 1.0));
      return (spec.rho + 1.0) / (spec.rho * spec.xi) * (-std::expm1(-spec.rho * level));
    }
    case Family::Cel: {
      const double x = spec.rho * spec.gamma * s / (spec.rho + 1.0);
      return (spec.rho + 1.0) / spec.xi * std::log1p(-std::expm1(-x) / spec.rho);
    }
    case Family::LHalf:
      return std::sqrt(s);
  }
  throw std::logic_error("psi: unreachable");
}

double psi_prime(const PenaltySpec& spec, double s) {
  spec.validate();
  if (spec.family == Family::LHalf) {
    if (std::isnan(s) || s <= 0.0)
      throw std::domain_error("psi_prime: s must be positive for LHALF");
    return 0.5 / std::sqrt(s);
  }
  if (std::isnan(s) || s < 0.0) throw std::domain_error("psi_prime: s must be nonnegative");
  const double slope0 = spec.gamma / spec.xi;
  switch (spec.family) {
    case Family::Log:
      return slope0 / (spec.gamma * s + 1.0);
    case Family::Exp:
      return slope0 * std::exp(-spec.gamma * s);
    case Family::Lfr: {
      const double g1 = spec.gamma * s + 1.0;
      return slope0 / (g1 * g1);
    }
    case Family::Cel1: {
      const double e = std::exp(-spec.gamma * s);
      return slope0 * e / (2.0 - e);
    }
    case Family::Pg:
      return slope0 * std::exp(-(spec.rho + 1.0) * std::log1p(spec.gamma * s / (spec.rho + 1.0)));
    case Family::Cel: {
      const double x = spec.rho * spec.gamma * s / (spec.rho + 1.0);
      const double e = std::exp(-x);
      const double one_minus_e = -std::expm1(-x);
      return slope0 * spec.rho * e / (spec.rho + one_minus_e);
    }
    default:
      throw std::logic_error("psi_prime: unreachable");
  }
}

bool check_ordering(double gamma, std::span<const double> grid) {
  const PenaltySpec cel1(Family::Cel1, gamma, gamma);
  const PenaltySpec lfr(Family::Lfr, gamma, gamma);
  const PenaltySpec exp_pen(Family::Exp, gamma, gamma);
  const PenaltySpec log_pen(Family::Log, gamma, gamma);
  for (double s : grid) {
    const double a = psi(cel1, s);
    const double b = psi(lfr, s);
    const double c = psi(exp_pen, s);
    const double d = psi(log_pen, s);
    if (!(a < b && b < c && c < d && d < s)) return false;
  }
  return true;
}

double limit_residual(Family family, Family target, double rho, double xi,
                      double gamma, std::span<const double> grid) {
  if (family != Family::Pg && family != Family::Cel)
    throw std::invalid_argument("limit_residual: family must be PG or CEL");
  if (target != Family::Log && target != Family::Exp)
    throw std::invalid_argument("limit_residual: target must be LOG or EXP");
  const PenaltySpec approx(family, xi, gamma, rho);
  const PenaltySpec exact(target, xi, gamma);
  double worst = 0.0;
  for (double s : grid) worst = std::max(worst, std::abs(psi(approx, s) - psi(exact, s)));
  return worst;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2)
    throw std::invalid_argument("log_grid: need 0 < lo < hi and n >= 2");
  std::vector<double> out(static_cast<std::size_t>(n));
  const double step = (std::log(hi) - std::log(lo)) / (n - 1);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = std::exp(std::log(lo) + i * step);
  out.front() = lo;
  out.back() = hi;
  return out;
}

}  // namespace subpen
