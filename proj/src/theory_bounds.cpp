#include "opinion_queues/theory_bounds.hpp"

#include "opinion_queues/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace oq {

namespace {

constexpr double kIntegrationSlack = 1e-9;
constexpr double kZ99 = 2.3263478740408408; // one-sided 99% normal quantile
constexpr std::uint64_t kStartTag = 0x73746172ULL;
constexpr std::size_t kMaxDumps = 20;

int sgn(double v) { return (v > 0) - (v < 0); }

} // namespace

void TheoremInputs::validate() const {
  if (!(zeta > 0 && zeta <= 1)) throw DomainError("zeta must lie in (0, 1]");
  if (!(psi >= 0 && psi < 1)) throw DomainError("psi must lie in [0, 1)");
  if (!(beta > 0 && beta <= 1)) throw DomainError("beta must lie in (0, 1]");
  if (n_agents < 1) throw DomainError("N must be >= 1");
}

BoundReport lemma1_margin(std::span<const AgentParams> params, const SocialNetwork& net,
                          NormConvention norm) {
  BoundReport r;
  r.norm = norm;
  r.infinity_norm = net.infinity_norm(norm == NormConvention::FullRow);
  r.margins.reserve(params.size());
  for (const auto& p : params) {
    r.margins.push_back(p.gamma * r.b_sharp - p.omega * (p.u0 + p.K) - p.alpha * r.infinity_norm);
  }
  r.mbar = params.empty() ? 0.0 : *std::min_element(r.margins.begin(), r.margins.end());
  r.nu = std::tanh(r.mbar);
  r.condition_holds = r.mbar > 0;
  return r;
}

double lemma2_min_interval(std::span<const AgentParams> params, double mbar) {
  if (!(mbar > 0)) throw DomainError("minimum decision interval requires mbar > 0");
  const double nu = std::tanh(mbar);
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& p : params) {
    if (!(p.lambda > 0)) throw DomainError("minimum decision interval requires lambda > 0");
    worst = std::max(worst, std::log((p.lambda + nu) / nu) / p.lambda);
  }
  return worst;
}

BoundReport lemma2_beta(BoundReport report, std::span<const AgentParams> params, double mbar,
                        double dt_D) {
  report.mbar_used = mbar;
  report.dt_D = dt_D;
  report.dtD_threshold = lemma2_min_interval(params, mbar);
  const double nu = std::tanh(mbar);
  report.beta_i.clear();
  for (const auto& p : params) {
    const double decay = std::exp(-p.lambda * dt_D);
    report.beta_i.push_back(-decay + nu / p.lambda * (1.0 - decay));
  }
  report.beta = *std::min_element(report.beta_i.begin(), report.beta_i.end());
  report.beta_positive = *report.beta > 0;
  return report;
}

double theorem_p_nash(int n_agents, double beta, double psi) {
  if (n_agents < 1) throw DomainError("p_N requires N >= 1");
  if (!(beta > 0 && beta <= 1)) throw DomainError("p_N requires 0 < beta <= 1");
  if (!(psi >= 0 && psi < 1)) throw DomainError("p_N requires 0 <= psi < 1");
  double best = std::numeric_limits<double>::infinity();
  for (int q = 1; q <= n_agents; ++q) {
    double binom = 1.0; // C(q, 0)
    for (int s = 1; s <= q; ++s) {
      binom = binom * (q - s + 1) / s;
      best = std::min(best, binom * std::pow(beta, s) * std::pow(1.0 - psi, q - s));
    }
  }
  return best;
}

double theorem_hit_bound(int n_agents, double zeta, double p_nash) {
  if (!(zeta > 0)) throw DomainError("hitting bound requires zeta > 0");
  if (!(p_nash > 0)) throw DomainError("hitting bound requires p_N > 0");
  return n_agents / zeta + 1.0 / p_nash;
}

double waiting_pool_bound(int n_agents, double zeta) {
  if (!(zeta > 0)) throw DomainError("waiting-pool bound requires zeta > 0");
  return n_agents / zeta;
}

nlohmann::json to_json(const BoundReport& r) {
  auto opt = [](const std::optional<double>& v) -> nlohmann::json {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  nlohmann::json j;
  j["b_sharp"] = r.b_sharp;
  j["norm_convention"] = r.norm == NormConvention::OffDiagonal ? "off_diagonal" : "full_row";
  j["infinity_norm"] = r.infinity_norm;
  j["margins"] = r.margins;
  j["mbar"] = r.mbar;
  j["nu"] = r.nu;
  j["condition_holds"] = r.condition_holds;
  j["mbar_used"] = opt(r.mbar_used);
  j["dtD_threshold"] = opt(r.dtD_threshold);
  j["dt_D"] = opt(r.dt_D);
  j["beta_i"] = r.beta_i;
  j["beta"] = opt(r.beta);
  j["beta_positive"] = r.beta_positive;
  return j;
}

// --- empirical checks -------------------------------------------------------

void check_trace_against_lemmas(const TrialTrace& trace, double beta, std::size_t trial_index,
                                LemmaValidation& out) {
  const auto& recs = trace.records;
  for (std::size_t k = 0; k + 1 < recs.size(); ++k) {
    const EpochRecord& pre = recs[k];
    if (pre.in_band) continue;
    const int b = pre.n_A - pre.n_B;
    if (std::abs(b) < kMinImbalanceOutsideBand) {
      ++out.skipped_epochs;
      continue;
    }
    const int sigma = -sgn(b);
    const auto& z_next = recs[k + 1].opinions;
    for (std::size_t i = 0; i < trace.n_agents; ++i) {
      if (pre.locations[i] == Location::Departed || !trace.informed[i]) continue;
      ++out.checks;
      const double z = z_next[i];
      out.min_aligned_opinion = std::min(out.min_aligned_opinion, sigma * z);
      auto dump = [&](const char* kind) {
        if (out.dumps.size() >= kMaxDumps) return;
        out.dumps.push_back({trial_index, k, i, b, z, kind, pre.opinions, pre.locations});
      };
      if (sgn(z) != sigma) {
        ++out.sign_violations;
        dump("sign");
      }
      if (std::abs(z) < beta - kIntegrationSlack) {
        ++out.magnitude_violations;
        dump("magnitude");
      }
    }
  }
}

LemmaValidation validate_lemmas_empirically(const TrialSetup& setup, std::size_t trials,
                                            std::uint64_t master_seed, NormConvention norm) {
  setup.validate();
  LemmaValidation out;
  const auto& params = setup.model.params;
  out.bounds = lemma1_margin(params, setup.model.network, norm);
  if (!out.bounds.condition_holds) {
    std::ostringstream os;
    os << "precondition unmet: alignment margin mbar = " << out.bounds.mbar << " is not positive";
    out.reason = os.str();
    return out;
  }
  try {
    out.bounds = lemma2_beta(out.bounds, params, out.bounds.mbar, setup.model.dt_D);
  } catch (const DomainError& e) {
    out.reason = std::string("precondition unmet: ") + e.what();
    return out;
  }
  if (!(setup.model.dt_D > *out.bounds.dtD_threshold)) {
    std::ostringstream os;
    os << "precondition unmet: dt_D = " << setup.model.dt_D
       << " does not exceed the minimum interval " << *out.bounds.dtD_threshold;
    out.reason = os.str();
    return out;
  }
  if (setup.masked_count() != 0) {
    out.reason = "precondition unmet: every agent must observe the imbalance (rho = 0)";
    return out;
  }
  const std::size_t n = setup.n_agents();
  if (n < 2) {
    out.reason = "precondition unmet: imbalanced starts need N >= 2";
    return out;
  }

  out.min_aligned_opinion = std::numeric_limits<double>::infinity();
  const double beta = *out.bounds.beta;
  for (std::size_t t = 0; t < trials; ++t) {
    TrialSetup trial_setup = setup;
    trial_setup.initial_locations = imbalanced_start(n, master_seed, t);
    const TrialTrace trace = run_trial(trial_setup, master_seed, t);
    check_trace_against_lemmas(trace, beta, t, out);
    ++out.trials;
  }
  out.status = (out.sign_violations + out.magnitude_violations == 0) ? ValidationStatus::Passed
                                                                     : ValidationStatus::Violated;
  return out;
}

std::vector<Location> imbalanced_start(std::size_t n_agents, std::uint64_t master_seed,
                                       std::uint64_t trial_index) {
  if (n_agents < 2) throw std::invalid_argument("imbalanced start needs N >= 2");
  CounterRng rng = CounterRng::for_trial(master_seed, trial_index).split(kStartTag);
  std::vector<Location> start(n_agents);
  int imbalance = 0;
  do {
    imbalance = 0;
    for (auto& l : start) {
      l = rng.uniform01() < 0.5 ? Location::QueueA : Location::QueueB;
      imbalance += location_code(l);
    }
  } while (std::abs(imbalance) < kMinImbalanceOutsideBand);
  return start;
}

void accumulate_theorem_estimates(const TrialTrace& trace, TheoremEstimates& est) {
  const auto& recs = trace.records;
  for (std::size_t k = 0; k + 1 < recs.size(); ++k) {
    const EpochRecord& pre = recs[k];
    const auto& z_next = recs[k + 1].opinions;
    if (pre.n_W > 0) {
      double best = 0.0;
      for (std::size_t i = 0; i < trace.n_agents; ++i) {
        if (pre.locations[i] == Location::Waiting) best = std::max(best, std::abs(z_next[i]));
      }
      est.zeta = est.zeta ? std::min(*est.zeta, best) : best;
    } else if (!pre.in_band) {
      const int b = pre.n_A - pre.n_B;
      if (b == 0) continue;
      const Location expensive = b > 0 ? Location::QueueA : Location::QueueB;
      for (std::size_t i = 0; i < trace.n_agents; ++i) {
        if (pre.locations[i] != expensive) continue;
        const double m = std::abs(z_next[i]);
        est.psi = est.psi ? std::max(*est.psi, m) : m;
      }
    }
  }
}

TheoremCheck check_theorem_consistency(const TrialSetup& setup, std::size_t trials,
                                       std::uint64_t master_seed, StartKind start,
                                       NormConvention norm) {
  setup.validate();
  TheoremCheck out;
  const auto& params = setup.model.params;
  BoundReport bounds = lemma1_margin(params, setup.model.network, norm);
  if (!bounds.condition_holds) {
    out.reason = "alignment condition fails";
    return out;
  }
  bounds = lemma2_beta(bounds, params, bounds.mbar, setup.model.dt_D);
  if (!bounds.beta_positive) {
    out.reason = "dt_D does not exceed the minimum decision interval";
    return out;
  }
  out.beta = *bounds.beta;

  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    TrialSetup trial_setup = setup;
    if (start == StartKind::Imbalanced) {
      trial_setup.initial_locations = imbalanced_start(setup.n_agents(), master_seed, t);
    }
    const TrialTrace trace = run_trial(trial_setup, master_seed, t);
    accumulate_theorem_estimates(trace, out.estimates);
    ++out.trials;
    if (const auto tau = hitting_time(trace)) {
      const double epoch = std::round(*tau / setup.model.dt_D);
      sum += epoch;
      sum_sq += epoch * epoch;
      ++out.hits;
    }
  }
  if (out.hits == 0) {
    out.reason = "no trial hit the band within the horizon";
    return out;
  }
  const double h = static_cast<double>(out.hits);
  out.mean_hit_epoch = sum / h;
  const double var = out.hits > 1 ? std::max(0.0, (sum_sq - h * out.mean_hit_epoch * out.mean_hit_epoch) / (h - 1)) : 0.0;
  out.stderr_hit_epoch = std::sqrt(var / h);

  const int n = static_cast<int>(setup.n_agents());
  const double zeta = out.estimates.zeta.value_or(1.0);
  if (!(zeta > 0)) {
    out.reason = "a waiting-pool epoch had every waiting opinion at 0; zeta undefined";
    return out;
  }
  // No expensive-queue observation means the psi hypothesis holds for any psi.
  const double psi = out.estimates.psi.value_or(0.0);
  if (psi >= 1.0) {
    out.p_nash = 0.0;
    out.bound_epochs = std::numeric_limits<double>::infinity();
  } else {
    out.p_nash = theorem_p_nash(n, std::min(out.beta, 1.0), psi);
    out.bound_epochs = theorem_hit_bound(n, zeta, out.p_nash);
  }

  if (out.hits != out.trials) {
    out.reason = std::to_string(out.trials - out.hits) + " trial(s) censored at the horizon";
    return out;
  }
  out.passed = out.mean_hit_epoch - kZ99 * out.stderr_hit_epoch <= out.bound_epochs;
  if (!out.passed) out.reason = "mean hitting epoch exceeds the bound at 99% confidence";
  return out;
}

} // namespace oq
