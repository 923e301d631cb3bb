#pragma once

#include "tailest/types.hpp"

#include <array>
#include <cstdint>

namespace tailest {

/// SplitMix64 finalizer (Steele, Lea & Flood). Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

/// SplitMix64 stream, used to expand a 64-bit seed into generator state.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
  }

 private:
  std::uint64_t state_;
};

/// xoshiro256++ (Blackman & Vigna). Platform-independent and seedable; this
/// is the generator recorded in dataset provenance headers.
class Xoshiro256pp {
 public:
  static constexpr const char* kName = "xoshiro256++";

  explicit Xoshiro256pp(std::uint64_t seed) noexcept {
    SplitMix64 sm(seed);
    for (auto& word : state_) word = sm.next();
  }

  std::uint64_t next() noexcept {
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

  /// Uniform draw on (0, 1] with 53-bit resolution. The right-open end is
  /// excluded so inverse-transform sampling never evaluates a quantile at 0.
  scalar_t uniform01() noexcept {
    return static_cast<scalar_t>((next() >> 11) + 1) * 0x1.0p-53;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
};

/// Per-trial seed derived from (base_seed, n, trial). Chained bijective
/// mixing keeps seeds distinct within an experiment.
constexpr seed_t trial_seed(seed_t base_seed, std::uint64_t n, std::uint64_t trial) noexcept {
  const std::uint64_t golden = 0x9E3779B97F4A7C15ULL;
  return mix64(mix64(base_seed + golden * n) + golden * (trial + 1));
}

}  // namespace tailest
