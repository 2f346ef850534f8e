#include "wlvm/rng.hpp"

#include "wlvm/types.hpp"

#include <cmath>
#include <numbers>

namespace wlvm {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

}  // namespace

std::uint64_t Rng::derive_seed(std::uint64_t seed, std::uint64_t a,
                               std::uint64_t b) {
  std::uint64_t s = mix64(seed + kGolden);
  s = mix64(s ^ (a + 2 * kGolden));
  s = mix64(s ^ (b + 3 * kGolden));
  return s;
}

Rng Rng::substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return Rng(derive_seed(seed, a, b));
}

double Rng::uniform01() {
  // 53 random bits, shifted into (0, 1).
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() {
  const double u1 = uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::gamma(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0)) {
    throw InvalidInput("gamma shape and scale must be positive");
  }
  if (shape < 1.0) {
    const double boost = gamma(shape + 1.0, scale);
    return boost * std::pow(uniform01(), 1.0 / shape);
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
    const double u = uniform01();
    if (u < 1.0 - 0.0331 * (x * x) * (x * x)) return d * v * scale;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
      return d * v * scale;
    }
  }
}

}  // namespace wlvm
