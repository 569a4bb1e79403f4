#ifndef LPP_RNG_HPP
#define LPP_RNG_HPP

#include <cstdint>

namespace lpp {

inline constexpr std::uint64_t kGolden64 = 0x9e3779b97f4a7c15ull;

// SplitMix64 finalizer. Full avalanche, bit-exact on every platform.
inline constexpr std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return x;
}

// Signed -> unsigned, small magnitudes stay small.
inline constexpr std::uint64_t zigzag64(std::int64_t v) {
  return (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63);
}

// Stream seed for worker/replication `index` under a master seed.
inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(master + kGolden64 * (index + 1));
}

// Top 53 bits -> [0,1).
inline constexpr double unit_double(std::uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t next() {
    state_ += kGolden64;
    return mix64(state_);
  }

  double next_unit() { return unit_double(next()); }

  // Uniform in [0, n), unbiased by rejection. n must be positive.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace lpp

#endif
