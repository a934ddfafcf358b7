#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace leafwalk {

// Purpose tags so that independent consumers of one user seed never share a
// stream.
enum class StreamTag : std::uint64_t {
  kOrbitSample = 1,
  kBootstrap = 2,
  kBackward = 3,
  kPushforward = 4,
  kResample = 5,
  kLyapunov = 6,
  kProbe = 7,
  kFuzz = 8,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// 64-bit generator with explicit stream derivation. Every Monte Carlo draw
// in the library comes from Rng::stream(seed, tag, index), so a sample's
// randomness depends only on its index and never on evaluation order.
class Rng {
 public:
  explicit Rng(std::uint64_t state) : engine_(state) {}

  static Rng stream(std::uint64_t seed, StreamTag tag, std::uint64_t index) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ static_cast<std::uint64_t>(tag));
    h = splitmix64(h ^ index);
    return Rng(h);
  }

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on {0, ..., n - 1}; Lemire's rejection keeps it unbiased.
  std::uint64_t below(std::uint64_t n) {
    std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      std::uint64_t x = engine_();
      __uint128_t m = static_cast<__uint128_t>(x) * n;
      if (static_cast<std::uint64_t>(m) >= threshold) {
        return static_cast<std::uint64_t>(m >> 64);
      }
    }
  }

  double normal() {
    // Box-Muller on our own uniforms; std::normal_distribution is not
    // reproducible across standard libraries.
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace leafwalk
