#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string_view>
#include <vector>

namespace csicl {

/// SplitMix64 finalizer (Steele, Lea & Flood). Bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t z) noexcept;

/// Portable deterministic generator. The n-th output (n = 1, 2, ...) is
/// mix64(seed + n * 0x9e3779b97f4a7c15), i.e. SplitMix64. Every draw in the
/// harness goes through this type so results reproduce bit-for-bit on any
/// platform; std:: distributions are deliberately not used.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept;

  /// Unbiased integer in [0, bound) by rejection. bound must be > 0.
  std::uint64_t below(std::uint64_t bound) noexcept;

 private:
  std::uint64_t state_;
};

/// Derives an independent stream seed from a base seed and string parts:
/// s = base; for each part: s = mix64(s ^ fnv1a64(part)).
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::string_view> parts);

/// Stream seed for an integer index (bootstrap iteration, query number).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept;

/// Draws k distinct indices from [0, n) by partial Fisher-Yates, in draw order.
std::vector<std::size_t> draw_without_replacement(std::size_t n, std::size_t k, SplitMix64& rng);

}  // namespace csicl
