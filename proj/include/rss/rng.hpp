#pragma once

#include <cstdint>
#include <random>

#include "rss/distributions.hpp"

namespace rss {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Seeded random stream.  Replicated work derives one substream per
// replication from (master seed, replication index) so that results do not
// depend on how replications are scheduled across threads.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  static RandomStream substream(std::uint64_t master, std::uint64_t index) {
    return RandomStream(splitmix64(master ^ splitmix64(index + 1)));
  }

  // Uniform on the open interval (0, 1).
  double uniform01() {
    const std::uint64_t bits = engine_() >> 11;  // 53 random bits
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via inverse-CDF; stateless between calls.
  double normal() { return normal_quantile(uniform01()); }

  // Unbiased integer in [0, bound), bound >= 1.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (-bound) % bound;
    for (;;) {
      const std::uint64_t r = engine_();
      if (r >= threshold) return r % bound;
    }
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rss
