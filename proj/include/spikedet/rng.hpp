#pragma once

#include <compare>
#include <cstdint>

namespace spikedet {

/// Root/stream pair identifying a reproducible random source.
struct Seed {
  std::uint64_t root = 0;
  std::uint64_t stream = 0;

  friend auto operator<=>(const Seed&, const Seed&) = default;
};

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Child seed for a sub-task; the same (parent, a, b, c) always yields the
/// same child, so tasks can run in any order.
constexpr Seed derive(Seed parent, std::uint64_t a, std::uint64_t b = 0,
                      std::uint64_t c = 0) noexcept {
  std::uint64_t s = mix64(parent.stream ^ mix64(a + 0x632be59bd9b4e019ULL));
  s = mix64(s ^ mix64(b + 0x8cb92ba72f3d8dd7ULL));
  s = mix64(s ^ mix64(c + 0x4f1bbcdcbfa53e0bULL));
  return Seed{parent.root, s};
}

/// Counter-based generator: draw k is a pure function of (seed, k).
///
/// There is no hidden state, so entry (i, j) of a matrix can be generated
/// from counter i*n + j by any thread, in any order, with identical results.
class CounterRng {
 public:
  explicit constexpr CounterRng(Seed seed) noexcept
      : key_(mix64(mix64(seed.root) ^ (seed.stream * 0xd1342543de82ef95ULL))) {}

  constexpr std::uint64_t bits(std::uint64_t counter) const noexcept {
    return mix64(key_ ^ mix64(counter));
  }

  /// Uniform on the open interval (0, 1).
  double uniform(std::uint64_t counter) const noexcept;

  /// Standard normal (Box-Muller on counters 2k and 2k+1).
  double normal(std::uint64_t counter) const noexcept;

  /// +1 or -1 with equal probability.
  double sign(std::uint64_t counter) const noexcept {
    return (bits(counter) >> 63) != 0 ? 1.0 : -1.0;
  }

 private:
  std::uint64_t key_;
};

}  // namespace spikedet
