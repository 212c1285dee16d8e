#pragma once

#include <cstdint>
#include <random>

namespace torsim {

// splitmix64 finalizer; bijective on u64.
std::uint64_t mix64(std::uint64_t x);

// Order-sensitive combine for deriving sub-stream seeds.
std::uint64_t mix_seeds(std::uint64_t a, std::uint64_t b);

// Deterministic random stream. All distribution transforms are implemented
// in-repo on top of raw mt19937_64 output, because the standard library's
// distribution objects are not bit-reproducible across implementations.
// Identical seeds give identical draw sequences for a given binary.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double canonical();

  // Uniform on (0, 1]; safe as a log() argument.
  double unit_open();

  // Uniform index in [0, n). Requires n > 0.
  std::size_t uniform_index(std::size_t n);

  // Standard normal via Box-Muller (no spare caching; two words per draw).
  double normal();

  // Exponential with the given mean. Requires mean > 0.
  double exponential(double mean);

  // exp(mu_ln + sigma_ln * Z).
  double lognormal(double mu_ln, double sigma_ln);

  // Gamma(shape, 1) via Marsaglia-Tsang; shape < 1 handled by boosting.
  double gamma(double shape);

  // Beta(a, b) as Ga/(Ga+Gb). Requires a > 0 and b > 0.
  double beta(double a, double b);

 private:
  std::mt19937_64 engine_;
};

}  // namespace torsim
