#include "cft/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cft {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finalizer (Steele, Lea & Flood).
std::uint64_t mix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

RngStream RngStream::make(std::uint64_t seed, std::uint64_t purpose,
                          std::uint64_t substream) {
  RngStream s;
  s.key_ = mix64(mix64(seed) ^ mix64(purpose * 0xD1342543DE82EF95ULL) ^
                 mix64(substream * 0xAF251AF3B0F025B5ULL));
  return s;
}

std::uint64_t RngStream::next_u64() {
  return mix64(key_ + (counter_++) * kGolden);
}

double RngStream::next_double() {
  // 53 top bits -> [0, 1)
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_normal() {
  double u1 = next_double();
  double u2 = next_double();
  if (u1 < 0x1.0p-60) u1 = 0x1.0p-60;
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

double RngStream::next_gamma(double alpha) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("next_gamma: alpha must be > 0");
  }
  if (alpha < 1.0) {
    // Boost: Gamma(a) = Gamma(a+1) * U^{1/a}
    const double g = next_gamma(alpha + 1.0);
    double u = next_double();
    if (u < 1e-300) u = 1e-300;
    return g * std::pow(u, 1.0 / alpha);
  }
  // Marsaglia-Tsang squeeze method.
  const double d = alpha - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = next_normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = next_double();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (u > 1e-300 &&
        std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
      return d * v;
    }
  }
}

std::size_t RngStream::next_index(std::size_t n) {
  if (n == 0) throw std::invalid_argument("next_index: empty range");
  // Rejection-free modulo is fine here; n is tiny relative to 2^64.
  return static_cast<std::size_t>(next_u64() % n);
}

}  // namespace cft
