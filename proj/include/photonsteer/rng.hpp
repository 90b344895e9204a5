#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace photonsteer {

// SplitMix64. Small, fast, and its output depends only on the 64-bit state,
// which is what makes per-trial streams cheap to derive.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller. Consumes two draws per call.
  double normal() {
    double u1 = uniform();
    const double u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)); }

 private:
  std::uint64_t state_;
};

/// Finalizer of SplitMix64, usable as a 64-bit mixing function.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Independent generator for (master seed, trial index, stream id).
/// The result depends only on the triple, so trials can run in any order
/// on any worker and still produce bit-identical draws.
inline SplitMix64 trial_stream(std::uint64_t master_seed, std::uint64_t trial, std::uint64_t stream_id) {
  std::uint64_t h = mix64(master_seed + 0x9e3779b97f4a7c15ULL);
  h = mix64(h ^ (trial + 0x632be59bd9b4e019ULL));
  h = mix64(h ^ (stream_id * 0xd1b54a32d192ed03ULL + 1));
  return SplitMix64(h);
}

}  // namespace photonsteer
