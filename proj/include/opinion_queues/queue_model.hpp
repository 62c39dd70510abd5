#pragma once

#include "opinion_queues/congestion_game.hpp"
#include "opinion_queues/opinion_dynamics.hpp"
#include "opinion_queues/rng.hpp"
#include "opinion_queues/trace.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace oq {

struct ServiceConfig {
  double mu_A = 0.0;
  double mu_B = 0.0;

  void validate() const;
};

/// Joint Markov state (z_k, l_k) plus the information mask and the trial's generator.
struct SystemState {
  std::size_t epoch = 0;
  double time = 0.0;
  OpinionVector opinions;
  std::vector<Location> locations;
  std::vector<bool> informed;
  CounterRng rng;
  std::size_t clamp_count = 0;

  std::size_t size() const { return locations.size(); }
  QueueCounts counts() const;
  int n_departed() const;
  int imbalance() const { return counts().imbalance(); }
  /// Agents still in the system (not departed).
  int n_active() const { return static_cast<int>(size()) - n_departed(); }
  bool in_band() const;
};

/// Everything epoch_step needs besides the state.
struct Model {
  std::vector<AgentParams> params;
  SocialNetwork network;
  ServiceConfig service;
  double dt_D = 0.1;
  double dt = 0.01;

  void validate() const;
};

/// n_A - n_B for informed agents, 0 for masked ones.
double environment_input(const SystemState& state, std::size_t i);

/// Join/switch rule applied simultaneously against the pre-epoch locations.
/// uniforms[i] is agent i's draw; it is ignored for departed agents.
std::vector<Location> apply_maneuvers(std::span<const Location> pre, std::span<const double> z_next,
                                      std::span<const double> uniforms);

/// Draws one uniform per non-departed agent (ascending index) from state.rng
/// and applies the join/switch rule.  Does not modify state.locations.
std::vector<Location> maneuver_draws(SystemState& state, const OpinionVector& z_next);

/// Poisson(mu_q dt_D) service events per queue; that many members (capped at
/// occupancy) depart, chosen uniformly without replacement.  Queues with rate
/// zero consume no randomness.
SystemState service_step(SystemState state, const ServiceConfig& cfg, double dt_D,
                         std::vector<Event>* events = nullptr);

/// One decision epoch: inputs -> integrate -> maneuvers -> service -> epoch+1.
SystemState epoch_step(SystemState state, const Model& model, std::vector<Event>* events = nullptr);

/// Snapshot of a state for the trace.
EpochRecord make_record(const SystemState& state);

/// Static description of one trial.
struct TrialSetup {
  Model model;
  double horizon = 30.0;
  double rho = 0.0;       // masked fraction
  double z0_sigma = 0.1;
  bool fixed_mask = false; // same masked subset for every trial of a master seed
  std::optional<std::vector<Location>> initial_locations; // default: all Waiting

  std::size_t n_agents() const { return model.params.size(); }
  std::size_t epoch_count() const;
  std::size_t masked_count() const;
  void validate() const;
};

/// Initial state: z0 ~ Normal(0, z0_sigma^2) clamped, locations from the
/// setup (all Waiting by default), round(rho N) agents masked.
SystemState initial_state(const TrialSetup& setup, std::uint64_t master_seed,
                          std::uint64_t trial_index);

/// Runs epoch_step until t = T and records every epoch boundary.
/// Deterministic in (master_seed, trial_index).
TrialTrace run_trial(const TrialSetup& setup, std::uint64_t master_seed, std::uint64_t trial_index);

} // namespace oq
