#pragma once

#include <cmath>
#include <cstdint>

namespace diffnet {

// splitmix64 finalizer; full-avalanche mixing of a 64-bit word.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Folds one identifier into a stream key. Chaining fold() calls derives
// non-overlapping substreams from a single master seed, so that every
// (run, node, iteration) tuple owns its own random stream and results do
// not depend on scheduling or worker count.
constexpr std::uint64_t fold(std::uint64_t key, std::uint64_t id) noexcept {
  return mix64(key ^ (id + 0x9E3779B97F4A7C15ULL + (key << 6) + (key >> 2)));
}

// Deterministic random stream identified by a 64-bit key.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) noexcept : state_(mix64(key)) {}

  std::uint64_t next_u64() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // uniform in (0,1]; never returns 0 so it is safe under log()
  double next_unit() noexcept {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // uniform in [low, high)
  double next_range(double low, double high) noexcept {
    return low + (high - low) * static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // standard normal via Box-Muller (deterministic across platforms,
  // unlike std::normal_distribution)
  double next_gaussian() noexcept {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    constexpr double two_pi = 6.283185307179586476925286766559;
    const double r = std::sqrt(-2.0 * std::log(next_unit()));
    const double theta = two_pi * next_unit();
    cached_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
  }

  // uniform integer in [0, n), n > 0
  int next_below(int n) noexcept {
    const auto wide = static_cast<unsigned __int128>(next_u64()) *
                      static_cast<unsigned __int128>(n);
    return static_cast<int>(wide >> 64);
  }

 private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace diffnet
