// Command-line front end: single trials, parameter sweeps, bound reports and
// the exhaustive Nash-band oracle check.

#include "opinion_queues/congestion_game.hpp"
#include "opinion_queues/errors.hpp"
#include "opinion_queues/mc_harness.hpp"
#include "opinion_queues/queue_model.hpp"
#include "opinion_queues/sim_config.hpp"
#include "opinion_queues/theory_bounds.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

namespace {

using nlohmann::json;

oq::SimConfig config_or_default(const std::string& path) {
  if (path.empty()) {
    oq::SimConfig cfg;
    cfg.validate();
    return cfg;
  }
  return oq::load_config(path);
}

void warn_on_clamping(std::size_t clamps, const oq::SimConfig& cfg) {
  if (clamps == 0) return;
  bool damped = true;
  for (const auto& p : cfg.agent_params()) damped = damped && p.lambda >= 1.0;
  if (damped) {
    std::cerr << "warning: " << clamps
              << " opinion components were clamped to [-1, 1] although every lambda >= 1;"
                 " this indicates integration error (try a smaller dt)\n";
  }
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            const std::string& network, std::optional<double> rho, std::size_t trial,
            const std::string& out) {
  oq::SimConfig cfg = config_or_default(config_path);
  if (seed) cfg.master_seed = *seed;
  if (!network.empty()) cfg.network = oq::NetworkSpec::parse(network);
  if (rho) cfg.rho = *rho;
  cfg.validate();

  const oq::TrialTrace trace = oq::run_trial(cfg.trial_setup(), cfg.master_seed, trial);
  oq::write_trace_csv(out, trace);
  const oq::TrialSummary s = oq::summarize_trial(trace);
  std::cout << "network=" << cfg.network.name() << " rho=" << oq::format_number(cfg.rho)
            << " seed=" << cfg.master_seed << " trial=" << trial << '\n';
  if (s.hit) {
    std::cout << "hit band at t=" << s.tau << ", persistence after last entry " << s.persistence << '\n';
  } else {
    std::cout << "never hit the band within T=" << cfg.T << '\n';
  }
  std::cout << "mean switches per agent " << s.switches_mean << '\n';
  std::cout << "trace written to " << out << " (" << trace.records.size() << " rows)\n";
  warn_on_clamping(trace.clamp_count, cfg);
  return 0;
}

int cmd_sweep(const std::string& config_path, std::optional<std::size_t> trials,
              std::optional<std::uint64_t> seed, const std::string& out_dir, std::size_t workers) {
  oq::SimConfig cfg = config_or_default(config_path);
  if (trials) cfg.trials = *trials;
  if (seed) cfg.master_seed = *seed;
  cfg.validate();
  workers = oq::resolve_workers(workers);

  const auto start = std::chrono::steady_clock::now();
  const auto results = oq::run_sweep(cfg, cfg.networks, cfg.rhos, workers);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::printf("%-13s %5s %8s %8s %7s %8s %8s\n", "network", "rho", "tau", "sd(tau)", "r", "S",
              "T_N");
  std::size_t clamps = 0;
  for (const auto& c : results) {
    const auto& s = c.stats;
    std::printf("%-13s %5.2f %8.2f %8.2f %7.3f %8.2f %8.2f\n", c.network.name().c_str(), c.rho,
                s.tau_mean, s.tau_std, s.hit_fraction, s.switches_mean, s.persistence_mean);
    clamps += s.clamp_count;
  }
  const auto written = oq::emit_outputs(results, out_dir);
  std::printf("%zu trials per cell, %zu worker(s), %.1f s; %zu files written to %s\n", cfg.trials,
              workers, secs, written.size(), out_dir.c_str());
  warn_on_clamping(clamps, cfg);
  return 0;
}

int cmd_check_theory(const std::string& config_path, std::optional<double> mbar,
                     std::optional<double> zeta, std::optional<double> psi) {
  const oq::SimConfig cfg = config_or_default(config_path);
  const auto params = cfg.agent_params();
  const oq::SocialNetwork net = cfg.network.build(static_cast<std::size_t>(cfg.N));

  oq::BoundReport report = oq::lemma1_margin(params, net);
  std::optional<double> mbar_used = mbar;
  if (!mbar_used && report.condition_holds) mbar_used = report.mbar;
  if (mbar_used) {
    if (!(*mbar_used > 0)) throw oq::DomainError("--mbar must be positive");
    report = oq::lemma2_beta(report, params, *mbar_used, cfg.dt_D);
  }

  json j = oq::to_json(report);
  j["network"] = cfg.network.name();
  j["N"] = cfg.N;
  if (!cfg.agents && cfg.params.omega > 0) {
    j["critical_attention"] = oq::critical_attention(cfg.params, net);
    j["critical_gain"] = oq::critical_gain(cfg.params);
  }

  json theorem = json::object();
  if (zeta) {
    theorem["zeta"] = *zeta;
    theorem["waiting_bound_epochs"] = oq::waiting_pool_bound(cfg.N, *zeta);
  }
  if (psi) theorem["psi"] = *psi;
  if (zeta && psi && report.beta && report.beta_positive) {
    oq::TheoremInputs in{*zeta, *psi, cfg.N, std::min(*report.beta, 1.0)};
    in.validate();
    const double p = oq::theorem_p_nash(cfg.N, in.beta, in.psi);
    const double bound = oq::theorem_hit_bound(cfg.N, in.zeta, p);
    theorem["p_nash"] = p;
    theorem["hit_bound_epochs"] = bound;
    theorem["hit_bound_time"] = bound * cfg.dt_D;
  } else if (zeta && psi) {
    theorem["note"] = "hitting bound needs a positive beta (alignment condition and dt_D threshold)";
  }
  if (!theorem.empty()) j["theorem"] = theorem;

  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_nash_oracle(int n_max) {
  if (n_max < 2) throw oq::ConfigError("--n-max must be >= 2");
  if (n_max > 24) throw oq::ConfigError("--n-max above 24 is not supported");
  const auto cost = oq::CostFunction::linear();
  std::size_t total_mismatches = 0;
  for (int n = 2; n <= n_max; ++n) {
    std::size_t mismatches = 0;
    std::vector<int> profile(static_cast<std::size_t>(n));
    for (unsigned long mask = 0; mask < (1UL << n); ++mask) {
      oq::QueueCounts counts;
      for (int i = 0; i < n; ++i) {
        profile[static_cast<std::size_t>(i)] = (mask >> i) & 1UL ? 1 : -1;
        ((mask >> i) & 1UL ? counts.n_A : counts.n_B)++;
      }
      if (oq::is_nash_brute_force(profile, cost) != oq::in_nash_band(counts, n)) ++mismatches;
    }
    std::cout << "N=" << n << ": " << (1UL << n) << " profiles, " << mismatches << " mismatches\n";
    total_mismatches += mismatches;
  }
  if (total_mismatches == 0) {
    std::cout << "equivalence holds\n";
    return 0;
  }
  std::cout << "equivalence FAILS (" << total_mismatches << " mismatches)\n";
  return 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Opinion-driven two-queue selection: simulation, sweeps and bound checks"};
  app.require_subcommand(1);

  std::string config_path;
  std::string network;
  std::string out = "trace.csv";
  std::string out_dir = "results";
  std::optional<std::uint64_t> seed;
  std::optional<double> rho, mbar, zeta, psi;
  std::optional<std::size_t> trials;
  std::size_t trial_index = 0;
  std::size_t workers = 0;
  int n_max = 8;

  auto* run = app.add_subcommand("run", "Run one trial and write its trace CSV");
  run->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Master seed (overrides config)");
  run->add_option("--network", network, "all_positive | all_negative");
  run->add_option("--rho", rho, "Masked fraction in [0, 1]");
  run->add_option("--trial", trial_index, "Trial index within the seed's stream");
  run->add_option("--out", out, "Trace CSV path");

  auto* sweep = app.add_subcommand("sweep", "Run the (network, rho) grid and write summaries");
  sweep->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  sweep->add_option("--trials", trials, "Trials per cell (overrides config)");
  sweep->add_option("--seed", seed, "Master seed (overrides config)");
  sweep->add_option("--out-dir", out_dir, "Output directory");
  sweep->add_option("--workers", workers,
                    "Worker threads, 0 = all cores (OPINION_QUEUES_WORKERS overrides)");

  auto* check = app.add_subcommand("check-theory", "Print the bound report as JSON");
  check->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  check->add_option("--mbar", mbar, "Alignment margin to use for the opinion floor");
  check->add_option("--zeta", zeta, "Waiting-pool opinion floor");
  check->add_option("--psi", psi, "Expensive-queue opinion ceiling");

  auto* oracle = app.add_subcommand("nash-oracle", "Exhaustive Nash band equivalence check");
  oracle->add_option("--n-max", n_max, "Largest N to enumerate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*run) return cmd_run(config_path, seed, network, rho, trial_index, out);
    if (*sweep) return cmd_sweep(config_path, trials, seed, out_dir, workers);
    if (*check) return cmd_check_theory(config_path, mbar, zeta, psi);
    if (*oracle) return cmd_nash_oracle(n_max);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
