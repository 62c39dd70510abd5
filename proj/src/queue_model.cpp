#include "opinion_queues/queue_model.hpp"

#include "opinion_queues/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace oq {

namespace {

constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kDynamicsStream = 2;
constexpr std::uint64_t kMaskStream = 3;
constexpr std::uint64_t kFixedMaskTag = 0x6d61736bULL;

int sgn(double v) { return (v > 0) - (v < 0); }

} // namespace

void ServiceConfig::validate() const {
  if (!(mu_A >= 0) || !std::isfinite(mu_A)) throw ConfigError("mu_A must be a finite rate >= 0");
  if (!(mu_B >= 0) || !std::isfinite(mu_B)) throw ConfigError("mu_B must be a finite rate >= 0");
}

QueueCounts SystemState::counts() const {
  QueueCounts c;
  for (Location l : locations) {
    switch (l) {
    case Location::QueueA: ++c.n_A; break;
    case Location::QueueB: ++c.n_B; break;
    case Location::Waiting: ++c.n_W; break;
    case Location::Departed: break;
    }
  }
  return c;
}

int SystemState::n_departed() const {
  return static_cast<int>(std::count(locations.begin(), locations.end(), Location::Departed));
}

bool SystemState::in_band() const {
  const int active = n_active();
  // An empty system has nobody left to deviate.
  if (active == 0) return true;
  return in_nash_band(counts(), active);
}

void Model::validate() const {
  if (params.empty()) throw ConfigError("N must be positive");
  for (std::size_t i = 0; i < params.size(); ++i) {
    try {
      params[i].validate();
    } catch (const ConfigError& e) {
      throw ConfigError("agent " + std::to_string(i) + ": " + e.what());
    }
  }
  if (network.size() != params.size()) {
    throw ConfigError("network size " + std::to_string(network.size()) +
                      " does not match agent count " + std::to_string(params.size()));
  }
  service.validate();
  substep_count(dt_D, dt);
}

double environment_input(const SystemState& state, std::size_t i) {
  if (i >= state.size()) throw std::out_of_range("environment_input: agent index out of range");
  return state.informed[i] ? static_cast<double>(state.imbalance()) : 0.0;
}

std::vector<Location> apply_maneuvers(std::span<const Location> pre, std::span<const double> z_next,
                                      std::span<const double> uniforms) {
  if (z_next.size() != pre.size() || uniforms.size() != pre.size()) {
    throw std::invalid_argument("apply_maneuvers: size mismatch");
  }
  std::vector<Location> next(pre.begin(), pre.end());
  for (std::size_t i = 0; i < pre.size(); ++i) {
    const Location here = pre[i];
    if (here == Location::Departed) continue;
    const double z = z_next[i];
    if (!(std::abs(z) <= 1.0)) {
      throw std::invalid_argument("apply_maneuvers: |z_" + std::to_string(i) + "| = " +
                                  std::to_string(std::abs(z)) + " exceeds 1");
    }
    const int direction = sgn(z);
    if (direction == 0) continue;
    const Location target = direction > 0 ? Location::QueueA : Location::QueueB;
    if (target == here) continue;
    // Waiting agents join sgn(z); queued agents switch only if sgn(z) points away.
    if (uniforms[i] <= std::abs(z)) next[i] = target;
  }
  return next;
}

std::vector<Location> maneuver_draws(SystemState& state, const OpinionVector& z_next) {
  if (z_next.size() != state.size()) throw std::invalid_argument("maneuver_draws: size mismatch");
  std::vector<double> uniforms(state.size(), 1.0);
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (state.locations[i] != Location::Departed) uniforms[i] = state.rng.uniform01();
  }
  return apply_maneuvers(state.locations, z_next.values(), uniforms);
}

SystemState service_step(SystemState state, const ServiceConfig& cfg, double dt_D,
                         std::vector<Event>* events) {
  const std::pair<Location, double> queues[] = {{Location::QueueA, cfg.mu_A},
                                                {Location::QueueB, cfg.mu_B}};
  for (const auto& [queue, rate] : queues) {
    if (rate <= 0) continue;
    std::poisson_distribution<long> poisson(rate * dt_D);
    const long drawn = poisson(state.rng);

    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < state.size(); ++i) {
      if (state.locations[i] == queue) members.push_back(i);
    }
    const std::size_t served = std::min<std::size_t>(static_cast<std::size_t>(drawn), members.size());
    // Partial Fisher-Yates: the first `served` slots are a uniform sample.
    for (std::size_t s = 0; s < served; ++s) {
      std::uniform_int_distribution<std::size_t> pick(s, members.size() - 1);
      std::swap(members[s], members[pick(state.rng)]);
      const std::size_t agent = members[s];
      state.locations[agent] = Location::Departed;
      if (events) events->push_back({state.epoch, agent, EventKind::Service, queue, Location::Departed});
    }
  }
  return state;
}

SystemState epoch_step(SystemState state, const Model& model, std::vector<Event>* events) {
  const std::size_t n = state.size();
  std::vector<double> b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = environment_input(state, i);

  auto raw = integrate_decision_interval(state.opinions.values(), model.params, model.network, b,
                                         model.dt_D, model.dt);
  OpinionVector z_next = OpinionVector::clamped(std::move(raw), &state.clamp_count);

  std::vector<Location> moved = maneuver_draws(state, z_next);
  if (events) {
    for (std::size_t i = 0; i < n; ++i) {
      if (moved[i] == state.locations[i]) continue;
      const EventKind kind =
          state.locations[i] == Location::Waiting ? EventKind::Join : EventKind::Switch;
      events->push_back({state.epoch, i, kind, state.locations[i], moved[i]});
    }
  }
  state.locations = std::move(moved);
  state.opinions = std::move(z_next);

  state = service_step(std::move(state), model.service, model.dt_D, events);
  ++state.epoch;
  state.time = static_cast<double>(state.epoch) * model.dt_D;
  return state;
}

EpochRecord make_record(const SystemState& state) {
  EpochRecord r;
  const QueueCounts c = state.counts();
  r.t = state.time;
  r.n_A = c.n_A;
  r.n_B = c.n_B;
  r.n_W = c.n_W;
  r.n_departed = state.n_departed();
  r.in_band = state.in_band();
  r.opinions = state.opinions.vector();
  r.locations = state.locations;
  return r;
}

std::size_t TrialSetup::epoch_count() const {
  if (!(horizon > 0) || !std::isfinite(horizon)) throw ConfigError("T must be positive");
  if (!(model.dt_D > 0)) throw ConfigError("dt_D must be positive");
  const double ratio = horizon / model.dt_D;
  const double rounded = std::round(ratio);
  if (rounded < 1 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    std::ostringstream os;
    os << "T / dt_D = " << horizon << " / " << model.dt_D << " is not a positive integer";
    throw ConfigError(os.str());
  }
  return static_cast<std::size_t>(rounded);
}

std::size_t TrialSetup::masked_count() const {
  return static_cast<std::size_t>(std::lround(rho * static_cast<double>(n_agents())));
}

void TrialSetup::validate() const {
  model.validate();
  epoch_count();
  if (!(rho >= 0.0 && rho <= 1.0)) throw ConfigError("rho must lie in [0, 1]");
  if (!(z0_sigma >= 0) || !std::isfinite(z0_sigma)) throw ConfigError("z0_sigma must be >= 0");
  if (initial_locations && initial_locations->size() != n_agents()) {
    throw ConfigError("initial_locations must have one entry per agent");
  }
}

SystemState initial_state(const TrialSetup& setup, std::uint64_t master_seed,
                          std::uint64_t trial_index) {
  const std::size_t n = setup.n_agents();
  const CounterRng trial = CounterRng::for_trial(master_seed, trial_index);
  CounterRng init = trial.split(kInitStream);

  std::vector<double> z0(n, 0.0);
  if (setup.z0_sigma > 0) {
    std::normal_distribution<double> normal(0.0, setup.z0_sigma);
    for (double& v : z0) v = normal(init);
  }

  SystemState state;
  state.opinions = OpinionVector::clamped(std::move(z0), &state.clamp_count);
  state.locations = setup.initial_locations.value_or(std::vector<Location>(n, Location::Waiting));

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  CounterRng mask_rng = setup.fixed_mask ? CounterRng(master_seed).split(kFixedMaskTag)
                                         : trial.split(kMaskStream);
  const std::size_t masked = setup.masked_count();
  for (std::size_t s = 0; s < masked; ++s) {
    std::uniform_int_distribution<std::size_t> pick(s, n - 1);
    std::swap(order[s], order[pick(mask_rng)]);
  }
  state.informed.assign(n, true);
  for (std::size_t s = 0; s < masked; ++s) state.informed[order[s]] = false;

  state.rng = trial.split(kDynamicsStream);
  return state;
}

TrialTrace run_trial(const TrialSetup& setup, std::uint64_t master_seed, std::uint64_t trial_index) {
  setup.validate();
  const std::size_t epochs = setup.epoch_count();

  SystemState state = initial_state(setup, master_seed, trial_index);
  TrialTrace trace;
  trace.n_agents = setup.n_agents();
  trace.dt_D = setup.model.dt_D;
  trace.horizon = setup.horizon;
  trace.informed = state.informed;
  trace.records.reserve(epochs + 1);
  trace.records.push_back(make_record(state));
  for (std::size_t k = 0; k < epochs; ++k) {
    state = epoch_step(std::move(state), setup.model, &trace.events);
    trace.records.push_back(make_record(state));
  }
  trace.clamp_count = state.clamp_count;
  return trace;
}

} // namespace oq
