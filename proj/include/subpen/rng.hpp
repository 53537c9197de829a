#pragma once

#include <cstdint>
#include <random>

namespace subpen {

// Derives the seed of an independent substream from a master seed via
// splitmix64, so parallel replications never share a generator.
std::uint64_t substream_seed(std::uint64_t master, std::uint64_t stream);

// Deterministic random source: std::mt19937_64 plus hand-rolled
// distributions (polar normal, Marsaglia-Tsang gamma, inversion/PTRS
// Poisson), so a given seed reproduces the same draws bit for bit on any
// platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform();                          // open (0, 1)
  double normal();                           // N(0, 1)
  double exponential(double scale);
  double gamma(double shape, double scale);  // shape < 1 handled by boosting
  long poisson(double mean);

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace subpen
