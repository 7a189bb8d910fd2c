#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <utility>

namespace svc {

// Counter-based randomness. Every random decision in the library is a pure
// function of (seed, stream index), so results do not depend on call order,
// thread scheduling or the standard library's distribution implementations.

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return splitmix64(seed ^ splitmix64(index ^ 0x6a09e667f3bcc909ULL));
}

/// Child seed for a path of indices, e.g. derive_seed(seed, trial, stage).
template <class... Index>
constexpr std::uint64_t derive_seed(std::uint64_t seed, Index... index) noexcept {
  ((seed = mix_seed(seed, static_cast<std::uint64_t>(index))), ...);
  return seed;
}

/// Uniform double in [0, 1) with 53 random bits.
constexpr double unit_uniform(std::uint64_t seed, std::uint64_t index) noexcept {
  return static_cast<double>(mix_seed(seed, index) >> 11) * 0x1.0p-53;
}

/// Sequential generator over the same counter scheme; models
/// std::uniform_random_bit_generator.
class CounterEngine {
 public:
  using result_type = std::uint64_t;

  explicit CounterEngine(std::uint64_t seed) noexcept : seed_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept { return mix_seed(seed_, counter_++); }

  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Unbiased integer in [0, bound) (Lemire's multiply-shift with rejection).
  std::uint64_t below(std::uint64_t bound) noexcept {
    if (bound <= 1) return 0;
    unsigned __int128 product = static_cast<unsigned __int128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(product);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        product = static_cast<unsigned __int128>((*this)()) * bound;
        low = static_cast<std::uint64_t>(product);
      }
    }
    return static_cast<std::uint64_t>(product >> 64);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

/// Fisher-Yates shuffle driven by CounterEngine (std::shuffle's output is
/// implementation-defined).
template <class T>
void seeded_shuffle(std::span<T> items, std::uint64_t seed) {
  CounterEngine engine(seed);
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(engine.below(i));
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

}  // namespace svc
