#ifndef QTELE_RNG_HPP
#define QTELE_RNG_HPP

#include <cstdint>

namespace qtele {

/// SplitMix64 finalizer.
inline constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Seed of run `index` in a batch started from `master`. Streams for
/// different indices are independent of each other and of evaluation order.
inline constexpr std::uint64_t derive_run_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(~index));
}

}  // namespace qtele

#endif  // QTELE_RNG_HPP
