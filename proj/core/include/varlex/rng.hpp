#pragma once

#include <cmath>
#include <cstdint>

namespace varlex {

// SplitMix64 (Steele/Lea/Flood). Self-contained so that seeded streams are
// identical across standard library implementations; reports produced from
// the same seed must not depend on the toolchain's distribution internals.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1), 53 random bits
  double uniform() { return std::ldexp(static_cast<double>(next() >> 11), -53); }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // uniform integer in [lo, hi] inclusive
  long uniform_int(long lo, long hi) {
    return lo + static_cast<long>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  // independent substream for item `k` of a seeded family
  static SplitMix64 substream(std::uint64_t seed, std::uint64_t k) {
    SplitMix64 root(seed);
    std::uint64_t s = root.next();
    return SplitMix64(s ^ (0x9e3779b97f4a7c15ULL * (k + 1)));
  }

 private:
  std::uint64_t state_;
};

}  // namespace varlex
