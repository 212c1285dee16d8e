#include "torsim/rng.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace torsim {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t mix_seeds(std::uint64_t a, std::uint64_t b) {
  return mix64(a ^ mix64(b + 0x632BE59BD9B4E019ull));
}

double RandomStream::canonical() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::unit_open() {
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

std::size_t RandomStream::uniform_index(std::size_t n) {
  assert(n > 0);
  // Multiply-shift map of a 64-bit word onto [0, n); bias < 2^-64.
  using u128 = unsigned __int128;
  return static_cast<std::size_t>((static_cast<u128>(next_u64()) * n) >> 64);
}

double RandomStream::normal() {
  const double u = unit_open();
  const double v = canonical();
  const double r = std::sqrt(-2.0 * std::log(u));
  return r * std::cos(6.283185307179586476925286766559 * v);
}

double RandomStream::exponential(double mean) {
  if (!(mean > 0.0)) throw std::invalid_argument("exponential: mean must be > 0");
  return -mean * std::log(unit_open());
}

double RandomStream::lognormal(double mu_ln, double sigma_ln) {
  return std::exp(mu_ln + sigma_ln * normal());
}

double RandomStream::gamma(double shape) {
  if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape must be > 0");
  if (shape < 1.0) {
    // Boost: Ga(k) = Ga(k+1) * U^(1/k).
    return gamma(shape + 1.0) * std::pow(unit_open(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = unit_open();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double RandomStream::beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("beta: shapes must be > 0");
  const double x = gamma(a);
  const double y = gamma(b);
  const double s = x + y;
  if (s <= 0.0) return a / (a + b);  // degenerate underflow guard
  return x / s;
}

}  // namespace torsim
