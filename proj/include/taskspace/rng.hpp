#pragma once

#include <cstdint>

namespace taskspace {

/// SplitMix64 output function.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based stream for sample `index` under `seed`: output j is
/// mix64(key + (j+1) * gamma) with key derived from (seed, index). Streams are
/// a pure function of (seed, index), so results do not depend on how samples
/// are distributed over threads.
class SampleRng {
 public:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  SampleRng(std::uint64_t seed, std::uint64_t index) : state_(mix64(mix64(seed + kGamma) ^ mix64(~index))) {}

  std::uint64_t next() {
    state_ += kGamma;
    return mix64(state_);
  }

  /// Uniform in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform in [0, n), n > 0 (multiply-shift, bias below 2^-64 * n).
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
  }

 private:
  std::uint64_t state_;
};

}  // namespace taskspace
