#include "opinion_queues/congestion_game.hpp"

#include <cstdlib>
#include <stdexcept>

namespace oq {

bool CostFunction::is_nondecreasing(int n_max) const {
  for (int n = 1; n < n_max; ++n) {
    if (cost_(n + 1) < cost_(n)) return false;
  }
  return true;
}

int delta_q_star(int n_agents) {
  if (n_agents < 1) throw std::invalid_argument("delta_q_star: N must be >= 1");
  return n_agents % 2 == 0 ? 0 : 1;
}

bool in_nash_band(const QueueCounts& counts, int n_agents) {
  return counts.n_W == 0 && std::abs(counts.imbalance()) <= delta_q_star(n_agents);
}

bool is_nash_brute_force(std::span<const int> profile, const CostFunction& cost) {
  auto occupancy = [](std::span<const int> p, int queue) {
    int n = 0;
    for (int v : p) n += (v == queue);
    return n;
  };
  for (int v : profile) {
    if (v != 1 && v != -1) throw std::invalid_argument("profile entries must be +1 or -1");
  }

  std::vector<int> deviated(profile.begin(), profile.end());
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const int mine = profile[i];
    const double current = cost(occupancy(profile, mine));
    deviated[i] = -mine;
    const double after = cost(occupancy(deviated, -mine));
    deviated[i] = mine;
    if (after < current) return false;
  }
  return true;
}

std::optional<double> hitting_time(const TrialTrace& trace) {
  for (const auto& r : trace.records) {
    if (r.in_band) return r.t;
  }
  return std::nullopt;
}

Persistence persistence_after_last_hit(const TrialTrace& trace, double horizon) {
  const auto& recs = trace.records;
  std::optional<std::size_t> last_entry;
  for (std::size_t k = 0; k < recs.size(); ++k) {
    if (recs[k].in_band && (k == 0 || !recs[k - 1].in_band)) last_entry = k;
  }
  if (!last_entry) return {};

  const double start = recs[*last_entry].t;
  for (std::size_t k = *last_entry + 1; k < recs.size(); ++k) {
    if (!recs[k].in_band) return {recs[k].t - start, true};
  }
  return {horizon - start, true};
}

SwitchCounts switch_count(const TrialTrace& trace) {
  SwitchCounts out;
  out.per_agent.assign(trace.n_agents, 0);
  for (std::size_t k = 1; k < trace.records.size(); ++k) {
    const auto& prev = trace.records[k - 1].locations;
    const auto& cur = trace.records[k].locations;
    for (std::size_t i = 0; i < trace.n_agents; ++i) {
      if (in_queue(prev[i]) && in_queue(cur[i]) && prev[i] != cur[i]) ++out.per_agent[i];
    }
  }
  if (trace.n_agents > 0) {
    long total = 0;
    for (int c : out.per_agent) total += c;
    out.mean = static_cast<double>(total) / static_cast<double>(trace.n_agents);
  }
  return out;
}

} // namespace oq
