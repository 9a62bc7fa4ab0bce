#pragma once

// Counter-based random streams. A stream is a (key, counter) pair and draw n
// is a pure function of both, so independent named streams derived from one
// master seed never interfere: changing how many numbers the policy consumes
// leaves the arrival stream untouched.

#include <cstdint>
#include <limits>
#include <span>
#include <string_view>

namespace pa {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t key = 0, std::uint64_t counter = 0)
      : key_(key), counter_(counter) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix64(key_ + (++counter_) * 0x9E3779B97F4A7C15ULL); }

  /// Uniform on [0,1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  /// Standard normal via Box-Muller (one draw per call; the pair's twin is discarded).
  double normal();
  /// Index drawn from the probability vector p by inversion.
  std::size_t categorical(std::span<const double> p);

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

/// Derives independent named streams from one master seed.
class StreamSplitter {
 public:
  explicit StreamSplitter(std::uint64_t master_seed) : master_(master_seed) {}

  RandomStream stream(std::string_view name, std::uint64_t index = 0) const {
    const std::uint64_t key = mix64(mix64(master_ ^ fnv1a64(name)) + mix64(index + 1));
    return RandomStream(key);
  }

 private:
  std::uint64_t master_;
};

}  // namespace pa
