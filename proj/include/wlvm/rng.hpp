#pragma once

#include <cstdint>
#include <random>

namespace wlvm {

// Seeded random stream with distribution transforms implemented in-repo so
// that draws are bit-reproducible across standard libraries (the std::
// distribution adaptors are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Counter-based substream derivation: the (a, b) channel of a root seed is
  // a fixed function of (seed, a, b), so adding replications or channels
  // never perturbs existing streams.
  static Rng substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);
  static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                                   std::uint64_t b = 0);

  // Uniform on the open interval (0, 1).
  double uniform01();

  // Standard normal via Box-Muller.
  double normal();

  // Gamma(shape, scale) with mean shape*scale. Marsaglia-Tsang
  // squeeze/rejection for shape >= 1; the shape-boost transform
  // G(k) = G(k+1) * U^(1/k) covers shape < 1.
  double gamma(double shape, double scale);

 private:
  std::mt19937_64 engine_;
};

}  // namespace wlvm
