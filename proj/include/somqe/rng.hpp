#pragma once

#include <cstdint>

namespace somqe {

/// SplitMix64 (Steele, Lea, Flood 2014). Used only to expand a 64-bit seed
/// into generator state and to derive substream seeds.
///
///   z  = (state += 0x9E3779B97F4A7C15)
///   z  = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z  = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   out = z ^ (z >> 31)
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// xoshiro256** 1.0 (Blackman, Vigna 2018), seeded by four consecutive
/// SplitMix64 outputs.
///
///   out = rotl(s1 * 5, 7) * 9
///   t = s1 << 17; s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3; s2 ^= t; s3 = rotl(s3, 45)
///
/// Derived draws, each consuming exactly one `next()`:
///   uniform01()  = (next() >> 11) * 2^-53            in [0, 1)
///   below(n)     = high 64 bits of (next() * n)      in [0, n)
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr Xoshiro256(std::uint64_t seed) noexcept {
    SplitMix64 sm(seed);
    for (auto& word : s_) word = sm.next();
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  constexpr result_type next() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  constexpr result_type operator()() noexcept { return next(); }

  constexpr double uniform01() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  constexpr std::uint64_t below(std::uint64_t n) noexcept {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  constexpr void discard(std::uint64_t count) noexcept {
    while (count-- > 0) next();
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4]{};
};

/// Seed for an independent substream identified by `index`.
constexpr std::uint64_t substream_seed(std::uint64_t seed,
                                       std::uint64_t index) noexcept {
  SplitMix64 sm(seed ^ (0xD1B54A32D192ED03ULL * (index + 1)));
  return sm.next();
}

}  // namespace somqe
