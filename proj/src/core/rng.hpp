#pragma once

#include <cmath>
#include <cstdint>

namespace rfim {

// 64-bit finalizer used for seeding and substream derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// xoshiro256++ seeded through splitmix64. All samplers consume a fixed
// number of draws per call, so streams replay bit-exactly.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& w : state_) w = splitmix64(s);
  }

  // Independent stream keyed by (master, index); index order does not
  // leak between streams, so parallel and sequential use agree.
  static RngStream substream(std::uint64_t master, std::uint64_t index) {
    std::uint64_t s = master;
    std::uint64_t a = splitmix64(s);
    std::uint64_t key = a ^ (0x9E3779B97F4A7C15ULL * (index + 1));
    return RngStream(key);
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

  // Uniform in [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1); safe under log().
  double uniform_open01() {
    double u;
    do {
      u = uniform01();
    } while (u <= 0.0);
    return u;
  }

  // Standard normal via Box-Muller (two uniforms per draw, no cached spare).
  double normal() {
    const double u1 = uniform_open01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t state_[4];
};

}  // namespace rfim
