#include "opinion_queues/rng.hpp"

namespace oq {

CounterRng CounterRng::for_trial(std::uint64_t master_seed, std::uint64_t trial_index) {
  const std::uint64_t base = mix(master_seed ^ 0x6a09e667f3bcc909ULL);
  return CounterRng(mix(base + mix(trial_index + 1) * kGamma));
}

CounterRng CounterRng::split(std::uint64_t tag) const {
  return CounterRng(mix(key_ ^ mix(tag + 0x3c6ef372fe94f82bULL)));
}

} // namespace oq
