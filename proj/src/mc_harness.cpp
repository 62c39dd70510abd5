#include "opinion_queues/mc_harness.hpp"

#include "opinion_queues/congestion_game.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace oq {

namespace fs = std::filesystem;

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

TrialSummary summarize_trial(const TrialTrace& trace) {
  TrialSummary s;
  if (const auto tau = hitting_time(trace)) {
    s.hit = true;
    s.tau = *tau;
    s.persistence = persistence_after_last_hit(trace, trace.horizon).duration;
  }
  s.switches_mean = switch_count(trace).mean;
  s.clamp_count = trace.clamp_count;
  return s;
}

AggregateStats aggregate(std::span<const TrialSummary> summaries) {
  AggregateStats a;
  a.trials = summaries.size();
  double tau_sum = 0.0, persist_sum = 0.0, switch_sum = 0.0;
  for (const auto& s : summaries) {
    switch_sum += s.switches_mean;
    a.clamp_count += s.clamp_count;
    if (!s.hit) continue;
    ++a.hits;
    tau_sum += s.tau;
    persist_sum += s.persistence;
  }
  a.hit_fraction = a.trials ? static_cast<double>(a.hits) / static_cast<double>(a.trials) : kNaN;
  a.switches_mean = a.trials ? switch_sum / static_cast<double>(a.trials) : kNaN;
  if (a.hits == 0) {
    a.tau_mean = a.tau_std = a.persistence_mean = kNaN;
    return a;
  }
  const double h = static_cast<double>(a.hits);
  a.tau_mean = tau_sum / h;
  a.persistence_mean = persist_sum / h;
  if (a.hits < 2) {
    a.tau_std = kNaN;
  } else {
    double ss = 0.0;
    for (const auto& s : summaries) {
      if (s.hit) ss += (s.tau - a.tau_mean) * (s.tau - a.tau_mean);
    }
    a.tau_std = std::sqrt(ss / (h - 1.0));
  }
  return a;
}

std::size_t resolve_workers(std::size_t requested) {
  if (const char* env = std::getenv("OPINION_QUEUES_WORKERS"); env && *env) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end && *end == '\0') requested = v;
  }
  if (requested == 0) requested = std::max(1u, std::thread::hardware_concurrency());
  return requested;
}

std::vector<TrialSummary> run_cell(const TrialSetup& setup, std::size_t trials,
                                   std::uint64_t master_seed, std::size_t workers) {
  setup.validate();
  std::vector<TrialSummary> out(trials);
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::size_t err_trial = std::numeric_limits<std::size_t>::max();
  std::string err_msg;
  constexpr std::size_t kChunk = 16;

  auto work = [&] {
    for (;;) {
      const std::size_t begin = next.fetch_add(kChunk);
      if (begin >= trials) return;
      const std::size_t end = std::min(trials, begin + kChunk);
      for (std::size_t t = begin; t < end; ++t) {
        try {
          out[t] = summarize_trial(run_trial(setup, master_seed, t));
        } catch (const std::exception& e) {
          std::lock_guard lock(err_mutex);
          if (t < err_trial) {
            err_trial = t;
            err_msg = e.what();
          }
          return;
        }
      }
    }
  };

  workers = std::max<std::size_t>(1, std::min(workers, trials));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (err_trial != std::numeric_limits<std::size_t>::max()) {
    throw std::runtime_error("trial " + std::to_string(err_trial) + " failed: " + err_msg);
  }
  return out;
}

std::vector<CellResult> run_sweep(const SimConfig& cfg, std::span<const NetworkSpec> networks,
                                  std::span<const double> rhos, std::size_t workers) {
  cfg.validate();
  std::vector<CellResult> results;
  for (const auto& net : networks) {
    for (double rho : rhos) {
      const TrialSetup setup = cfg.trial_setup(net, rho);
      CellResult cell;
      cell.network = net;
      cell.rho = rho;
      try {
        const auto summaries = run_cell(setup, cfg.trials, cfg.master_seed, workers);
        cell.stats = aggregate(summaries);
        for (std::size_t t = 0; t < std::min(cfg.trace_samples, cfg.trials); ++t) {
          cell.sample_indices.push_back(t);
          cell.samples.push_back(run_trial(setup, cfg.master_seed, t));
        }
      } catch (const std::exception& e) {
        throw std::runtime_error("cell network=" + net.name() + " rho=" + format_number(rho) +
                                 ": " + e.what());
      }
      results.push_back(std::move(cell));
    }
  }
  return results;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_summary_csv(std::ostream& out, std::span<const CellResult> results) {
  out << "network,rho,tau_mean,tau_std,r,switches_mean,persistence_mean\n";
  for (const auto& c : results) {
    const auto& s = c.stats;
    out << c.network.name() << ',' << format_number(c.rho) << ',' << format_number(s.tau_mean)
        << ',' << format_number(s.tau_std) << ',' << format_number(s.hit_fraction) << ','
        << format_number(s.switches_mean) << ',' << format_number(s.persistence_mean) << '\n';
  }
}

nlohmann::json summary_json(std::span<const CellResult> results) {
  auto num = [](double v) -> nlohmann::json {
    return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v);
  };
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& c : results) {
    const auto& s = c.stats;
    rows.push_back({{"network", c.network.name()},
                    {"rho", c.rho},
                    {"tau_mean", num(s.tau_mean)},
                    {"tau_std", num(s.tau_std)},
                    {"r", num(s.hit_fraction)},
                    {"switches_mean", num(s.switches_mean)},
                    {"persistence_mean", num(s.persistence_mean)},
                    {"trials", s.trials},
                    {"hits", s.hits},
                    {"clamp_count", s.clamp_count}});
  }
  return rows;
}

std::vector<SummaryRow> read_summary_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) ||
      line != "network,rho,tau_mean,tau_std,r,switches_mean,persistence_mean") {
    throw std::runtime_error("summary csv: unexpected header");
  }
  std::vector<SummaryRow> rows;
  std::size_t row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    if (cells.size() != 7) {
      throw std::runtime_error("summary csv: row " + std::to_string(row_no) + " has " +
                               std::to_string(cells.size()) + " columns");
    }
    auto parse = [&](const std::string& s) {
      if (s.empty()) return kNaN;
      double v = 0.0;
      const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
      if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw std::runtime_error("summary csv: row " + std::to_string(row_no) + ": bad number '" + s + "'");
      }
      return v;
    };
    rows.push_back({cells[0], parse(cells[1]), parse(cells[2]), parse(cells[3]), parse(cells[4]),
                    parse(cells[5]), parse(cells[6])});
  }
  return rows;
}

std::string trace_file_name(const NetworkSpec& net, double rho, std::size_t trial) {
  return "trace_" + net.name() + "_" + format_number(rho) + "_" + std::to_string(trial) + ".csv";
}

std::vector<std::string> emit_outputs(std::span<const CellResult> results, const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + out_dir + ": " + ec.message());

  std::vector<std::string> written;
  auto open = [](const fs::path& p) {
    std::ofstream f(p);
    if (!f) throw std::runtime_error("cannot open " + p.string() + " for writing");
    return f;
  };

  const fs::path csv_path = fs::path(out_dir) / "summary.csv";
  {
    auto f = open(csv_path);
    write_summary_csv(f, results);
    if (!f) throw std::runtime_error("failed writing " + csv_path.string());
  }
  written.push_back(csv_path.string());

  const fs::path json_path = fs::path(out_dir) / "summary.json";
  {
    auto f = open(json_path);
    f << summary_json(results).dump(2) << '\n';
    if (!f) throw std::runtime_error("failed writing " + json_path.string());
  }
  written.push_back(json_path.string());

  for (const auto& c : results) {
    for (std::size_t s = 0; s < c.samples.size(); ++s) {
      const fs::path p = fs::path(out_dir) / trace_file_name(c.network, c.rho, c.sample_indices[s]);
      write_trace_csv(p.string(), c.samples[s]);
      written.push_back(p.string());
    }
  }
  return written;
}

} // namespace oq
