#include "opinion_queues/congestion_game.hpp"
#include "opinion_queues/queue_model.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

using namespace oq;
using L = Location;

namespace {

std::vector<int> profile_from_bits(unsigned bits, int n) {
  std::vector<int> p(n);
  for (int i = 0; i < n; ++i) p[i] = (bits >> i) & 1u ? 1 : -1;
  return p;
}

QueueCounts counts_of(const std::vector<int>& p) {
  QueueCounts c;
  for (int v : p) (v > 0 ? c.n_A : c.n_B)++;
  return c;
}

// Trace with one agent per record whose band flags follow `flags`.
TrialTrace flag_trace(const std::vector<bool>& flags, double dt_D = 0.1) {
  TrialTrace tr;
  tr.n_agents = 1;
  tr.dt_D = dt_D;
  tr.horizon = dt_D * static_cast<double>(flags.size() - 1);
  for (std::size_t k = 0; k < flags.size(); ++k) {
    EpochRecord r;
    r.t = dt_D * static_cast<double>(k);
    r.in_band = flags[k];
    r.opinions = {0.0};
    r.locations = {L::Waiting};
    tr.records.push_back(r);
  }
  return tr;
}

TrialTrace location_trace(const std::vector<std::vector<L>>& rows) {
  TrialTrace tr;
  tr.n_agents = rows.front().size();
  tr.dt_D = 1.0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    EpochRecord r;
    r.t = static_cast<double>(k);
    r.locations = rows[k];
    r.opinions.assign(rows[k].size(), 0.0);
    tr.records.push_back(r);
  }
  tr.horizon = static_cast<double>(rows.size() - 1);
  return tr;
}

} // namespace

TEST_SUITE("congestion_game") {

TEST_CASE("band examples") {
  CHECK(delta_q_star(10) == 0);
  CHECK(delta_q_star(9) == 1);
  CHECK(delta_q_star(1) == 1);
  CHECK_THROWS_AS(delta_q_star(0), std::invalid_argument);
  CHECK(in_nash_band({5, 5, 0}, 10));
  CHECK_FALSE(in_nash_band({5, 4, 1}, 10));
  CHECK_FALSE(in_nash_band({6, 4, 0}, 10));
  CHECK(in_nash_band({5, 4, 0}, 9));
  CHECK_FALSE(in_nash_band({6, 3, 0}, 9));
}

TEST_CASE("band membership is symmetric in the queues") {
  for (int n = 1; n <= 12; ++n)
    for (int a = 0; a <= n; ++a)
      for (int b = 0; a + b <= n; ++b) {
        const QueueCounts c{a, b, n - a - b};
        const QueueCounts swapped{b, a, n - a - b};
        CHECK(in_nash_band(c, n) == in_nash_band(swapped, n));
      }
}

TEST_CASE("exhaustive equivalence with linear cost") {
  const std::map<int, int> expected{{2, 2}, {3, 6}, {4, 6}, {5, 20}, {6, 20}, {7, 70}, {8, 70}};
  const auto cost = CostFunction::linear();
  for (int n = 2; n <= 8; ++n) {
    int nash = 0;
    for (unsigned bits = 0; bits < (1u << n); ++bits) {
      const auto p = profile_from_bits(bits, n);
      const bool brute = is_nash_brute_force(p, cost);
      CHECK(brute == in_nash_band(counts_of(p), n));
      nash += brute;
    }
    CHECK(nash == expected.at(n));
  }
}

TEST_CASE("band profiles are Nash for any nondecreasing cost") {
  const std::vector<CostFunction> costs{
      CostFunction::constant(3.0),
      CostFunction([](int n) { return std::pow(n, 2.0); }),
      CostFunction([](int n) { return n >= 4 ? 1.0 : 0.0; }),
      CostFunction([](int n) { return std::log1p(n); }),
  };
  for (const auto& cost : costs) {
    REQUIRE(cost.is_nondecreasing(8));
    for (int n = 2; n <= 8; ++n)
      for (unsigned bits = 0; bits < (1u << n); ++bits) {
        const auto p = profile_from_bits(bits, n);
        if (in_nash_band(counts_of(p), n)) CHECK(is_nash_brute_force(p, cost));
      }
  }
  // The converse fails: with a flat cost every profile is Nash.
  CHECK(is_nash_brute_force(std::vector<int>{1, 1, 1, 1}, CostFunction::constant(1.0)));
  CHECK_FALSE(CostFunction([](int n) { return -n; }).is_nondecreasing(3));
}

TEST_CASE("brute force rejects bad profiles") {
  CHECK_THROWS_AS(is_nash_brute_force(std::vector<int>{1, 0}, CostFunction::linear()),
                  std::invalid_argument);
}

TEST_CASE("hitting time") {
  CHECK_FALSE(hitting_time(flag_trace({false, false, false})).has_value());
  CHECK(*hitting_time(flag_trace({false, false, true, false, true})) == doctest::Approx(0.2));
  CHECK(*hitting_time(flag_trace({true, false})) == 0.0);
}

TEST_CASE("persistence after the last hit") {
  // Enters at 0.2, leaves at 0.4, re-enters at 0.5, stays to the horizon 0.7.
  auto tr = flag_trace({false, false, true, true, false, true, true, true});
  auto p = persistence_after_last_hit(tr, tr.horizon);
  CHECK(p.hit);
  CHECK(p.duration == doctest::Approx(0.2));

  // Last entry at 0.1, exits at 0.3.
  tr = flag_trace({false, true, true, false, false});
  p = persistence_after_last_hit(tr, tr.horizon);
  CHECK(p.duration == doctest::Approx(0.2));

  // In band from the start and never leaves.
  tr = flag_trace({true, true, true});
  p = persistence_after_last_hit(tr, tr.horizon);
  CHECK(p.duration == doctest::Approx(0.2));

  tr = flag_trace({false, false});
  p = persistence_after_last_hit(tr, tr.horizon);
  CHECK_FALSE(p.hit);
  CHECK(p.duration == 0.0);
}

TEST_CASE("hitting precedes the last entry on simulated traces") {
  for (const auto& net : {SocialNetwork::all_positive(10), SocialNetwork::all_negative(10)}) {
    const auto setup = testing::reference_setup(net, 0.2);
    for (std::uint64_t k = 0; k < 30; ++k) {
      const auto tr = run_trial(setup, 31, k);
      const auto tau = hitting_time(tr);
      const auto p = persistence_after_last_hit(tr, tr.horizon);
      CHECK(tau.has_value() == p.hit);
      if (tau) {
        CHECK(*tau <= tr.horizon - p.duration + 1e-9);
        CHECK(p.duration >= 0.0);
      }
    }
  }
}

TEST_CASE("switch counting") {
  const auto tr = location_trace({
      {L::Waiting, L::Waiting, L::Waiting},
      {L::QueueA, L::Waiting, L::QueueB},
      {L::QueueB, L::QueueA, L::QueueB},
      {L::QueueA, L::QueueA, L::Departed},
      {L::QueueA, L::QueueB, L::Departed},
  });
  const auto s = switch_count(tr);
  CHECK(s.per_agent == std::vector<int>{2, 1, 0});
  CHECK(s.mean == doctest::Approx(1.0));
}

TEST_CASE("statistics are invariant under relabeling the queues") {
  const auto setup = testing::reference_setup(SocialNetwork::all_positive(10), 0.4);
  for (std::uint64_t k = 0; k < 10; ++k) {
    const auto tr = run_trial(setup, 8, k);
    TrialTrace flipped = tr;
    for (auto& r : flipped.records) {
      std::swap(r.n_A, r.n_B);
      for (auto& l : r.locations) {
        if (l == L::QueueA) l = L::QueueB;
        else if (l == L::QueueB) l = L::QueueA;
      }
      for (auto& z : r.opinions) z = -z;
    }
    CHECK(hitting_time(flipped) == hitting_time(tr));
    CHECK(switch_count(flipped).per_agent == switch_count(tr).per_agent);
    CHECK(persistence_after_last_hit(flipped, 30.0).duration ==
          persistence_after_last_hit(tr, 30.0).duration);
  }
}

} // TEST_SUITE
