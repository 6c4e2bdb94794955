#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string_view>

namespace dlf {

using Rng = std::mt19937_64;

/// Derives independent, reproducible substreams from one 64-bit seed.
/// Streams are keyed by stable labels ("reserve", "nibble", ...) and
/// optionally by integer indices (iteration, attempt, trial).
class SeedStream {
 public:
  constexpr explicit SeedStream(std::uint64_t seed) : state_(seed) {}

  constexpr SeedStream child(std::string_view label) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char ch : label) {
      h ^= static_cast<unsigned char>(ch);
      h *= 0x100000001b3ULL;
    }
    return SeedStream(mix(state_ ^ h));
  }

  constexpr SeedStream child(std::uint64_t index) const {
    return SeedStream(mix(state_ + 0x9e3779b97f4a7c15ULL * (index + 1)));
  }

  constexpr std::uint64_t seed() const { return state_; }
  Rng engine() const { return Rng(mix(state_)); }

 private:
  static constexpr std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

/// Uniform double in [0,1) from the top 53 bits; identical on every platform,
/// unlike std::uniform_real_distribution.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

/// Uniform integer in [0, n) by rejection; n > 0.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = (Rng::max() / n) * n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

template <class It>
void shuffle(It first, It last, Rng& rng) {
  for (auto n = last - first; n > 1; --n) {
    auto j = static_cast<decltype(n)>(uniform_index(rng, static_cast<std::uint64_t>(n)));
    std::iter_swap(first + (n - 1), first + j);
  }
}

}  // namespace dlf
