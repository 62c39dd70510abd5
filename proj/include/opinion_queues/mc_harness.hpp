#pragma once

#include "opinion_queues/queue_model.hpp"
#include "opinion_queues/sim_config.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace oq {

/// Statistics of a single trial.
struct TrialSummary {
  bool hit = false;
  double tau = 0.0;          // first time in band (hitting trials only)
  double persistence = 0.0;  // time in band after the last entry
  double switches_mean = 0.0;
  std::size_t clamp_count = 0;
};

TrialSummary summarize_trial(const TrialTrace& trace);

/// Per-cell statistics.  tau_mean, tau_std and persistence_mean average over
/// hitting trials only and are NaN when there are none (tau_std also needs two).
struct AggregateStats {
  double tau_mean = 0.0;
  double tau_std = 0.0;       // sample standard deviation of per-trial hitting times
  double hit_fraction = 0.0;  // r
  double switches_mean = 0.0; // over all trials
  double persistence_mean = 0.0;
  std::size_t trials = 0;
  std::size_t hits = 0;
  std::size_t clamp_count = 0;
};

/// Ordered reduction (trial index order).
AggregateStats aggregate(std::span<const TrialSummary> summaries);

struct CellResult {
  NetworkSpec network;
  double rho = 0.0;
  AggregateStats stats;
  std::vector<std::size_t> sample_indices;
  std::vector<TrialTrace> samples;
};

/// Worker count: OPINION_QUEUES_WORKERS if set, else `requested`; 0 means hardware concurrency.
std::size_t resolve_workers(std::size_t requested);

/// Runs trials [0, trials) of one setup on `workers` threads.  Results are
/// indexed by trial so the outcome does not depend on the worker count.
std::vector<TrialSummary> run_cell(const TrialSetup& setup, std::size_t trials,
                                   std::uint64_t master_seed, std::size_t workers);

/// Every (network, rho) cell with cfg.trials trials each; the first
/// cfg.trace_samples traces of each cell are kept.
std::vector<CellResult> run_sweep(const SimConfig& cfg, std::span<const NetworkSpec> networks,
                                  std::span<const double> rhos, std::size_t workers);

/// Shortest round-trip decimal form; NaN formats as the empty string.
std::string format_number(double v);

void write_summary_csv(std::ostream& out, std::span<const CellResult> results);
nlohmann::json summary_json(std::span<const CellResult> results);

struct SummaryRow {
  std::string network;
  double rho = 0.0;
  double tau_mean = 0.0;
  double tau_std = 0.0;
  double r = 0.0;
  double switches_mean = 0.0;
  double persistence_mean = 0.0;
};

/// Parses summary.csv; empty numeric fields read back as NaN.
std::vector<SummaryRow> read_summary_csv(std::istream& in);

std::string trace_file_name(const NetworkSpec& net, double rho, std::size_t trial);

/// Writes summary.csv, summary.json and trace_<network>_<rho>_<trial>.csv
/// into out_dir (created if needed).  Returns the written paths.
std::vector<std::string> emit_outputs(std::span<const CellResult> results, const std::string& out_dir);

} // namespace oq
