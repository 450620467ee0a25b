// SPDX-License-Identifier: MIT
/*!
  \file
  \brief Deterministic pseudo-random stream with a platform-independent
         mapping to doubles.

  The standard <random> distributions are implementation-defined, so sampled
  points would differ across standard libraries.  This generator guarantees
  byte-identical sample sequences everywhere, which the reporting layer relies
  on for reproducible runs.
*/
#pragma once

#include <cstdint>

namespace warpcheck {

/// splitmix64; passes through all 64-bit states, no warm-up needed.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) using the top 53 bits; exact on every platform.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
};

}  // namespace warpcheck
