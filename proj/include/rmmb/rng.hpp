#pragma once

#include <cstdint>

namespace rmmb {

// SplitMix64 finalizer.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Counter-based substream: the draw for (seed, trial, index) never depends on
// evaluation order, so two runs over different bidder subsets share randomness
// for the bidders they have in common.
inline std::uint64_t substream_key(std::uint64_t seed, std::uint64_t trial,
                                   std::uint64_t index) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ (trial + 0x517cc1b727220a95ull));
  h = splitmix64(h ^ (index + 0x2545f4914f6cdd1dull));
  return h;
}

// Uniform on the open interval (0, 1); never exactly 0 or 1.
inline double substream_uniform(std::uint64_t seed, std::uint64_t trial,
                                std::uint64_t index) {
  return static_cast<double>(substream_key(seed, trial, index) >> 11) *
             0x1.0p-53 +
         0x1.0p-54;
}

}  // namespace rmmb
