#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace ort {

// Counter-addressed deterministic generator built on the SplitMix64 mixer.
// Every draw is a pure function of (seed, stream, counter), so output is
// independent of evaluation order and thread count. Seeds are portable
// across platforms.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed + 0x9e3779b97f4a7c15ULL * (stream + 1))) {}

  // Derives a child seed for an independent stream (e.g. per tree node).
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
    return mix(mix(seed) ^ mix(stream * 0xbf58476d1ce4e5b9ULL + 0x94d049bb133111ebULL));
  }

  std::uint64_t bits(std::uint64_t counter) const { return mix(key_ ^ mix(counter + 1)); }

  // Uniform on (0,1]; never returns 0 so it is safe inside log().
  double uniform01(std::uint64_t counter) const {
    return (static_cast<double>(bits(counter) >> 11) + 1.0) * 0x1.0p-53;
  }

  double uniform(std::uint64_t counter, double lo, double hi) const {
    return lo + (hi - lo) * uniform01(counter);
  }

  // Standard normal via Box-Muller; consumes counters 2k and 2k+1.
  double gaussian(std::uint64_t counter) const {
    const double u1 = uniform01(2 * counter);
    const double u2 = uniform01(2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Integer in [0, n); n must be > 0.
  std::uint64_t below(std::uint64_t counter, std::uint64_t n) const {
    return bits(counter) % n;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
};

// Stateful convenience wrapper for test/search code that just wants a
// sequence of draws from a CounterRng.
class SequentialRng {
 public:
  explicit SequentialRng(std::uint64_t seed, std::uint64_t stream = 0) : rng_(seed, stream) {}

  double uniform01() { return rng_.uniform01(next_++); }
  double uniform(double lo, double hi) { return rng_.uniform(next_++, lo, hi); }
  double gaussian() { return rng_.gaussian(next_++); }
  std::uint64_t below(std::uint64_t n) { return rng_.below(next_++, n); }

 private:
  CounterRng rng_;
  std::uint64_t next_ = 0;
};

}  // namespace ort
