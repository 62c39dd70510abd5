#include "opinion_queues/sim_config.hpp"

#include "opinion_queues/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace oq {

using nlohmann::json;

std::string NetworkSpec::name() const {
  switch (kind) {
  case NetworkKind::AllPositive: return "all_positive";
  case NetworkKind::AllNegative: return "all_negative";
  case NetworkKind::Explicit: return "explicit";
  }
  return "unknown";
}

SocialNetwork NetworkSpec::build(std::size_t n) const {
  switch (kind) {
  case NetworkKind::AllPositive: return SocialNetwork::all_positive(n);
  case NetworkKind::AllNegative: return SocialNetwork::all_negative(n);
  case NetworkKind::Explicit: {
    SocialNetwork net = SocialNetwork::from_rows(matrix);
    if (net.size() != n) {
      throw ConfigError("network: explicit matrix is " + std::to_string(net.size()) + "x" +
                        std::to_string(net.size()) + " but N = " + std::to_string(n));
    }
    return net;
  }
  }
  throw ConfigError("network: unknown kind");
}

NetworkSpec NetworkSpec::parse(const std::string& name) {
  if (name == "all_positive" || name == "cooperative") return {NetworkKind::AllPositive, {}};
  if (name == "all_negative" || name == "anti_cooperative") return {NetworkKind::AllNegative, {}};
  throw ConfigError("network: unknown network '" + name +
                    "' (expected all_positive, all_negative or a matrix)");
}

std::vector<AgentParams> SimConfig::agent_params() const {
  if (agents) return *agents;
  return std::vector<AgentParams>(static_cast<std::size_t>(std::max(N, 0)), params);
}

TrialSetup SimConfig::trial_setup(const NetworkSpec& net, double rho_value) const {
  TrialSetup s;
  s.model.params = agent_params();
  s.model.network = net.build(static_cast<std::size_t>(N));
  s.model.service = {mu_A, mu_B};
  s.model.dt_D = dt_D;
  s.model.dt = dt;
  s.horizon = T;
  s.rho = rho_value;
  s.z0_sigma = z0_sigma;
  s.fixed_mask = fixed_mask;
  return s;
}

void SimConfig::validate() const {
  if (N < 1) throw ConfigError("N must be a positive integer");
  if (agents && agents->size() != static_cast<std::size_t>(N)) {
    throw ConfigError("agents: expected " + std::to_string(N) + " entries, got " +
                      std::to_string(agents->size()));
  }
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (!(rho >= 0 && rho <= 1)) throw ConfigError("rho must lie in [0, 1]");
  for (double r : rhos) {
    if (!(r >= 0 && r <= 1)) throw ConfigError("rhos: every value must lie in [0, 1]");
  }
  if (networks.empty()) throw ConfigError("networks must not be empty");
  trial_setup().validate();
  for (const auto& net : networks) net.build(static_cast<std::size_t>(N));
}

namespace {

template <typename T>
T get_field(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config field '" + key + "': " + e.what());
  }
}

double get_number(const json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError("config field '" + key + "' must be a number");
  return j.get<double>();
}

NetworkSpec network_from_json(const json& j, const std::string& key) {
  if (j.is_string()) return NetworkSpec::parse(j.get<std::string>());
  if (j.is_array()) {
    return {NetworkKind::Explicit, get_field<std::vector<std::vector<int>>>(j, key)};
  }
  throw ConfigError("config field '" + key + "' must be a network name or a matrix");
}

void read_params(const json& j, AgentParams& p, const std::string& prefix) {
  static const std::set<std::string> keys{"lambda", "omega", "gamma", "alpha", "u0", "K"};
  for (const auto& [k, v] : j.items()) {
    if (!keys.count(k)) throw ConfigError("unknown config key '" + prefix + k + "'");
  }
  if (j.contains("lambda")) p.lambda = get_number(j["lambda"], prefix + "lambda");
  if (j.contains("omega")) p.omega = get_number(j["omega"], prefix + "omega");
  if (j.contains("gamma")) p.gamma = get_number(j["gamma"], prefix + "gamma");
  if (j.contains("alpha")) p.alpha = get_number(j["alpha"], prefix + "alpha");
  if (j.contains("u0")) p.u0 = get_number(j["u0"], prefix + "u0");
  if (j.contains("K")) p.K = get_number(j["K"], prefix + "K");
}

} // namespace

SimConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known{
      "N",     "T",         "dt_D",     "dt",     "lambda",     "omega",         "gamma",
      "alpha", "u0",        "K",        "agents", "network",    "rho",           "mu_A",
      "mu_B",  "trials",    "master_seed", "z0_sigma", "fixed_mask", "networks", "rhos",
      "trace_samples"};
  for (const auto& [k, v] : j.items()) {
    if (!known.count(k)) throw ConfigError("unknown config key '" + k + "'");
  }

  SimConfig c;
  if (j.contains("N")) {
    if (!j["N"].is_number_integer()) throw ConfigError("config field 'N' must be an integer");
    c.N = j["N"].get<int>();
  }
  if (j.contains("T")) c.T = get_number(j["T"], "T");
  if (j.contains("dt_D")) c.dt_D = get_number(j["dt_D"], "dt_D");
  if (j.contains("dt")) c.dt = get_number(j["dt"], "dt");

  json shared = json::object();
  for (const char* k : {"lambda", "omega", "gamma", "alpha", "u0", "K"}) {
    if (j.contains(k)) shared[k] = j[k];
  }
  read_params(shared, c.params, "");
  if (j.contains("agents")) {
    if (!j["agents"].is_array()) throw ConfigError("config field 'agents' must be an array");
    std::vector<AgentParams> agents;
    for (std::size_t i = 0; i < j["agents"].size(); ++i) {
      AgentParams p = c.params;
      const auto& entry = j["agents"][i];
      if (!entry.is_object()) throw ConfigError("config field 'agents[" + std::to_string(i) + "]' must be an object");
      read_params(entry, p, "agents[" + std::to_string(i) + "].");
      agents.push_back(p);
    }
    c.agents = std::move(agents);
  }

  if (j.contains("network")) c.network = network_from_json(j["network"], "network");
  if (j.contains("networks")) {
    if (!j["networks"].is_array()) throw ConfigError("config field 'networks' must be an array");
    c.networks.clear();
    for (const auto& v : j["networks"]) c.networks.push_back(network_from_json(v, "networks"));
  }
  if (j.contains("rho")) c.rho = get_number(j["rho"], "rho");
  if (j.contains("rhos")) c.rhos = get_field<std::vector<double>>(j["rhos"], "rhos");
  if (j.contains("mu_A")) c.mu_A = get_number(j["mu_A"], "mu_A");
  if (j.contains("mu_B")) c.mu_B = get_number(j["mu_B"], "mu_B");
  if (j.contains("trials")) {
    if (!j["trials"].is_number_integer() || j["trials"].get<long long>() < 1) {
      throw ConfigError("config field 'trials' must be a positive integer");
    }
    c.trials = j["trials"].get<std::size_t>();
  }
  if (j.contains("master_seed")) {
    if (!j["master_seed"].is_number_integer()) throw ConfigError("config field 'master_seed' must be an integer");
    c.master_seed = j["master_seed"].get<std::uint64_t>();
  }
  if (j.contains("z0_sigma")) c.z0_sigma = get_number(j["z0_sigma"], "z0_sigma");
  if (j.contains("fixed_mask")) c.fixed_mask = get_field<bool>(j["fixed_mask"], "fixed_mask");
  if (j.contains("trace_samples")) {
    if (!j["trace_samples"].is_number_integer() || j["trace_samples"].get<long long>() < 0) {
      throw ConfigError("config field 'trace_samples' must be a nonnegative integer");
    }
    c.trace_samples = j["trace_samples"].get<std::size_t>();
  }
  c.validate();
  return c;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return config_from_json(json::object());
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path + ": " + e.what());
  }
  return config_from_json(j);
}

json to_json(const SimConfig& c) {
  auto net_json = [](const NetworkSpec& n) -> json {
    if (n.kind == NetworkKind::Explicit) return n.matrix;
    return n.name();
  };
  json j;
  j["N"] = c.N;
  j["T"] = c.T;
  j["dt_D"] = c.dt_D;
  j["dt"] = c.dt;
  j["lambda"] = c.params.lambda;
  j["omega"] = c.params.omega;
  j["gamma"] = c.params.gamma;
  j["alpha"] = c.params.alpha;
  j["u0"] = c.params.u0;
  j["K"] = c.params.K;
  if (c.agents) {
    json arr = json::array();
    for (const auto& p : *c.agents) {
      arr.push_back({{"lambda", p.lambda}, {"omega", p.omega}, {"gamma", p.gamma},
                     {"alpha", p.alpha}, {"u0", p.u0}, {"K", p.K}});
    }
    j["agents"] = arr;
  }
  j["network"] = net_json(c.network);
  j["rho"] = c.rho;
  j["mu_A"] = c.mu_A;
  j["mu_B"] = c.mu_B;
  j["trials"] = c.trials;
  j["master_seed"] = c.master_seed;
  j["z0_sigma"] = c.z0_sigma;
  j["fixed_mask"] = c.fixed_mask;
  json nets = json::array();
  for (const auto& n : c.networks) nets.push_back(net_json(n));
  j["networks"] = nets;
  j["rhos"] = c.rhos;
  j["trace_samples"] = c.trace_samples;
  return j;
}

} // namespace oq
