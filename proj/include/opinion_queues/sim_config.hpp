#pragma once

#include "opinion_queues/opinion_dynamics.hpp"
#include "opinion_queues/queue_model.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace oq {

enum class NetworkKind { AllPositive, AllNegative, Explicit };

struct NetworkSpec {
  NetworkKind kind = NetworkKind::AllNegative;
  std::vector<std::vector<int>> matrix; // Explicit only

  /// all_positive, all_negative or explicit.
  std::string name() const;
  SocialNetwork build(std::size_t n) const;

  /// Accepts all_positive / cooperative and all_negative / anti_cooperative.
  static NetworkSpec parse(const std::string& name);

  bool operator==(const NetworkSpec&) const = default;
};

/// Experiment configuration.  Defaults are the N = 10 reference experiment.
struct SimConfig {
  int N = 10;
  double T = 30.0;
  double dt_D = 0.1;
  double dt = 0.01;
  AgentParams params;                             // homogeneous population
  std::optional<std::vector<AgentParams>> agents; // per-agent override
  NetworkSpec network;
  double rho = 0.0;
  double mu_A = 0.0;
  double mu_B = 0.0;
  std::size_t trials = 10000;
  std::uint64_t master_seed = 20250101;
  double z0_sigma = 0.1;
  bool fixed_mask = false;

  // Sweep grid.
  std::vector<NetworkSpec> networks{{NetworkKind::AllPositive, {}}, {NetworkKind::AllNegative, {}}};
  std::vector<double> rhos{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  std::size_t trace_samples = 1;

  std::vector<AgentParams> agent_params() const;

  /// Setup for one (network, rho) cell.
  TrialSetup trial_setup(const NetworkSpec& net, double rho_value) const;
  TrialSetup trial_setup() const { return trial_setup(network, rho); }

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Flat JSON object; unknown keys and wrongly typed values are ConfigErrors.
SimConfig config_from_json(const nlohmann::json& j);
/// Reads and validates a config file.  An empty file yields the defaults.
SimConfig load_config(const std::string& path);

nlohmann::json to_json(const SimConfig& cfg);

} // namespace oq
