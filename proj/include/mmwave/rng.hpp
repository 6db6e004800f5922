#pragma once

#include <cstdint>
#include <random>

namespace mmwave {

/// Per-trial generator. Each trial owns one; never shared across threads.
using Engine = std::mt19937_64;

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed of substream `index` under `master`. Depends only on the pair, so a
/// trial draws the same numbers whichever worker runs it.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(mix64(master) ^ mix64(index + 0x632BE59BD9B4E019ULL));
}

/// Master seed plus the substream derivation rule.
class RngStream {
public:
  explicit RngStream(std::uint64_t master_seed) noexcept : master_seed_(master_seed) {}

  std::uint64_t master_seed() const noexcept { return master_seed_; }

  Engine substream(std::uint64_t trial) const { return Engine(derive_seed(master_seed_, trial)); }

private:
  std::uint64_t master_seed_;
};

/// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Maps a probability to a threshold on 32-bit uniforms: u < threshold has
/// probability p up to 2^-32 rounding. p = 1 maps to 2^32, so it always fires.
inline std::uint64_t probability_threshold(double p) {
  if (p <= 0.0) return 0;
  if (p >= 1.0) return std::uint64_t{1} << 32;
  return static_cast<std::uint64_t>(p * 0x1.0p32 + 0.5);
}

}  // namespace mmwave
