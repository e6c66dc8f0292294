#pragma once

#include <array>
#include <cstdint>

namespace meshsort {

/// xoshiro256** seeded through splitmix64. Output is identical on every
/// platform, which the synthetic generator relies on.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via Box-Muller. Both variates of a pair are used.
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  std::array<std::uint64_t, 4> s_{};
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace meshsort
