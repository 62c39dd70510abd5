#pragma once

#include "opinion_queues/trace.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace oq {

struct QueueCounts {
  int n_A = 0;
  int n_B = 0;
  int n_W = 0;

  int imbalance() const { return n_A - n_B; }
  bool operator==(const QueueCounts&) const = default;
};

/// Occupancy-dependent cost of a queue, shared by both queues.
class CostFunction {
public:
  explicit CostFunction(std::function<double(int)> cost) : cost_(std::move(cost)) {}

  static CostFunction linear() {
    return CostFunction([](int n) { return static_cast<double>(n); });
  }
  static CostFunction constant(double c) {
    return CostFunction([c](int) { return c; });
  }

  double operator()(int occupancy) const { return cost_(occupancy); }

  /// Checks c(1) <= c(2) <= ... <= c(n_max) by enumeration.
  bool is_nondecreasing(int n_max) const;

private:
  std::function<double(int)> cost_;
};

/// Equilibrium imbalance magnitude: 0 for even N, 1 for odd N.
int delta_q_star(int n_agents);

/// n_W = 0 and |n_A - n_B| <= delta_q_star(N).
bool in_nash_band(const QueueCounts& counts, int n_agents);

/// Pure-strategy Nash check by trying every unilateral deviation.
/// profile[i] is +1 (queue A) or -1 (queue B).
bool is_nash_brute_force(std::span<const int> profile, const CostFunction& cost);

/// Earliest recorded time with the in-band flag set, if any.
std::optional<double> hitting_time(const TrialTrace& trace);

struct Persistence {
  double duration = 0.0;
  bool hit = false;
};

/// Time spent in the band after the last entry into it: from the last
/// false->true transition (or t = 0 if the trace starts in band and never
/// re-enters) to the next false flag, or to the horizon.
Persistence persistence_after_last_hit(const TrialTrace& trace, double horizon);

struct SwitchCounts {
  std::vector<int> per_agent;
  double mean = 0.0;
};

/// Counts direct A<->B transitions between consecutive records per agent.
SwitchCounts switch_count(const TrialTrace& trace);

} // namespace oq
