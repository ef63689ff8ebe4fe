#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

#include "sumimo/complex.hpp"

namespace sumimo {

// SplitMix64 step, used for seeding and substream derivation.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// xoshiro256++ stream with a fixed Box-Muller transform for Gaussians.
// The generator and the transform are pinned project-wide: a given seed
// must always reproduce the same sample stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64_next(sm);
  }

  // Stream for unit `index` under `master_seed`. Independent of how
  // work units are distributed across threads.
  static Rng substream(std::uint64_t master_seed, std::uint64_t index) {
    std::uint64_t sm = master_seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    return Rng(splitmix64_next(sm));
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

  std::uint8_t bit() { return static_cast<std::uint8_t>(next_u64() & 1u); }

  // Zero-mean Gaussian with standard deviation sigma.
  double gaussian(double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian: sigma must be positive");
    return sigma * standard_normal();
  }

  // Circularly symmetric complex Gaussian; each dimension is an independent
  // zero-mean Gaussian with variance sigma_per_dim^2.
  Complex complex_gaussian(double sigma_per_dim) {
    if (!(sigma_per_dim > 0.0))
      throw std::invalid_argument("complex_gaussian: sigma must be positive");
    const double re = standard_normal();
    const double im = standard_normal();
    return {sigma_per_dim * re, sigma_per_dim * im};
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  double standard_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  std::uint64_t state_[4];
  double spare_ = 0.0;
  bool have_spare_ = false;
};

inline Complex sample_complex_gaussian(Rng& rng, double sigma_per_dim) {
  return rng.complex_gaussian(sigma_per_dim);
}

}  // namespace sumimo
