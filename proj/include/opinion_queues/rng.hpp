#pragma once

#include <cstdint>
#include <limits>

namespace oq {

/// Counter-based generator: output n is a bijective 64-bit mix of
/// (key + n * golden gamma).  The key fully determines the stream, so a
/// trial's stream is derived from (master_seed, trial_index) without any
/// shared state between trials.
///
/// Satisfies UniformRandomBitGenerator, so the <random> distributions
/// work on it directly.
class CounterRng {
public:
  using result_type = std::uint64_t;

  CounterRng() = default;
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  /// Stream for one trial of a sweep.
  static CounterRng for_trial(std::uint64_t master_seed, std::uint64_t trial_index);

  /// Independent child stream, e.g. for per-purpose sub-streams of a trial.
  [[nodiscard]] CounterRng split(std::uint64_t tag) const;

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix(key_ + (++counter_) * kGamma); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

  bool operator==(const CounterRng&) const = default;

  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  /// SplitMix64 finalizer.
  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

} // namespace oq
