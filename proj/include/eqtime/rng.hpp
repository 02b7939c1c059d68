#pragma once

#include <complex>
#include <cstdint>
#include <optional>

namespace eqtime {

/// Seedable random stream used everywhere randomness is needed, so that any
/// coupling set or Haar sample can be regenerated from (algorithm, seed).
///
/// Algorithm "splitmix64-boxmuller-v1":
///   state_{n+1} = state_n + 0x9E3779B97F4A7C15
///   z = state_{n+1}; z ^= z>>30; z *= 0xBF58476D1CE4E5B9;
///   z ^= z>>27; z *= 0x94D049BB133111EB; z ^= z>>31   -> 64 uniform bits
///   uniform (0,1]: ((bits >> 11) + 1) * 2^-53
///   gaussian pair: r = sqrt(-2 ln u1); (r cos 2*pi*u2, r sin 2*pi*u2),
///   the second value is cached and returned on the next call.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_bits() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in (0,1].
  double uniform();

  /// Standard normal variate (Box-Muller, basic form).
  double gaussian();

  /// Standard complex normal: (N(0,1) + i N(0,1)) / sqrt(2), unit variance.
  std::complex<double> complex_gaussian();

  /// Child seed for sample `index` of a stream seeded with `master`.
  /// child = splitmix64 output of state (master XOR (index+1)*0xD1B54A32D192ED03).
  static std::uint64_t derive(std::uint64_t master, std::uint64_t index);

 private:
  std::uint64_t state_;
  std::optional<double> cached_;
};

inline constexpr const char* kRngAlgorithm = "splitmix64-boxmuller-v1";

}  // namespace eqtime
