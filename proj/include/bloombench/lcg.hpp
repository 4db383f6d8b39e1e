#pragma once

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

namespace bloombench {

/// 64-bit linear congruential generator (Knuth MMIX constants). Portable
/// across languages: state' = a*state + c mod 2^64, draws use the high 32 bits.
class Lcg64 {
 public:
  static constexpr std::uint64_t kMultiplier = 6364136223846793005ULL;
  static constexpr std::uint64_t kIncrement = 1442695040888963407ULL;

  explicit Lcg64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    state_ = state_ * kMultiplier + kIncrement;
    return state_;
  }
  std::uint32_t next_u32() noexcept { return static_cast<std::uint32_t>(next() >> 32); }
  /// Uniform-ish draw in [0, bound).
  std::size_t below(std::size_t bound) noexcept { return static_cast<std::size_t>(next_u32() % bound); }

 private:
  std::uint64_t state_;
};

/// Fisher–Yates shuffle of 0..n-1 driven by Lcg64(seed), i from n-1 down to 1.
inline std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Lcg64 rng(seed);
  for (std::size_t i = n; i-- > 1;) std::swap(idx[i], idx[rng.below(i + 1)]);
  return idx;
}

}  // namespace bloombench
