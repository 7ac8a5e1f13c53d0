#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace fpmass {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

inline PhiloxCounter philox4x32(PhiloxCounter c, PhiloxKey k) {
  for (int r = 0; r < 10; ++r) {
    const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * c[0];
    const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * c[2];
    c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
         static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
    k[0] += 0x9E3779B9u;
    k[1] += 0xBB67AE85u;
  }
  return c;
}

inline PhiloxKey philox_key(std::uint64_t seed) {
  return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

// Counter for the normal pair used by steps 2m and 2m + 1 of one particle.
inline PhiloxCounter noise_counter(std::uint32_t particle, std::uint64_t pair) {
  return {particle, static_cast<std::uint32_t>(pair), static_cast<std::uint32_t>(pair >> 32), 0u};
}

// Two 53-bit uniforms in (0, 1].
inline double uniform_from_words(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t v = (std::uint64_t{hi} << 21) ^ (lo >> 11);
  return (static_cast<double>(v) + 1.0) * 0x1.0p-53;
}

struct NormalPair {
  double z0, z1;
};

// Box-Muller; the sine is recovered from the cosine so both lanes share one transcendental.
inline NormalPair box_muller(double u1, double u2) {
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double c = std::cos(2.0 * 3.14159265358979323846 * u2);
  return {r * c, std::copysign(r * std::sqrt(1.0 - c * c), 0.5 - u2)};
}

inline NormalPair normal_pair(std::uint32_t particle, std::uint64_t pair, PhiloxKey key) {
  const PhiloxCounter w = philox4x32(noise_counter(particle, pair), key);
  return box_muller(uniform_from_words(w[0], w[1]), uniform_from_words(w[2], w[3]));
}

}  // namespace fpmass
