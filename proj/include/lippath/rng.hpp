#pragma once

// Seedable, splittable uniform generator.
//
// Streams are keyed by (seed, index) through SplitMix64 and drive a
// xoshiro256** state, so draw i of a run is reproducible on its own and
// independent of how draws are scheduled across threads.

#include <array>
#include <cstdint>
#include <limits>

namespace lippath {

inline constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t mix_key(std::uint64_t a, std::uint64_t b) noexcept {
  std::uint64_t state = a;
  const std::uint64_t h = splitmix64(state);
  state = h ^ (b * 0xd1b54a32d192ed03ULL);
  return splitmix64(state);
}

class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) noexcept : key_(seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  /// Independent stream for draw `index` of a run seeded with `seed`.
  static Rng stream(std::uint64_t seed, std::uint64_t index) noexcept { return Rng(mix_key(seed, index)); }

  /// Child stream `k`; does not advance this generator.
  Rng split(std::uint64_t k) const noexcept { return Rng(mix_key(key_ ^ 0x5851f42d4c957f2dULL, k)); }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

  std::uint64_t key_;
  std::array<std::uint64_t, 4> state_{};
};

}  // namespace lippath
