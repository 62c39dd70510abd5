#pragma once

#include "opinion_queues/opinion_dynamics.hpp"
#include "opinion_queues/queue_model.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace oq {

/// Minimum |n_A - n_B| outside the Nash band once the waiting pool is empty.
inline constexpr int kMinImbalanceOutsideBand = 2;

/// Which row sum bounds the social term in the alignment margin.
enum class NormConvention {
  OffDiagonal,  // max_i sum_{j != i} |a_ij|, the sum actually coupled
  FullRow,      // max_i sum_j |a_ij|
};

/// Alignment-margin and opinion-floor quantities for one parameter set.
struct BoundReport {
  int b_sharp = kMinImbalanceOutsideBand;
  NormConvention norm = NormConvention::OffDiagonal;
  int infinity_norm = 0;
  std::vector<double> margins; // per agent: gamma b# - omega (u0 + K) - alpha ||A||
  double mbar = 0.0;           // min of margins
  double nu = 0.0;             // tanh(mbar)
  bool condition_holds = false;

  // Filled by lemma2_beta.
  std::optional<double> mbar_used;
  std::optional<double> dtD_threshold;
  std::optional<double> dt_D;
  std::vector<double> beta_i;
  std::optional<double> beta;
  bool beta_positive = false;
};

BoundReport lemma1_margin(std::span<const AgentParams> params, const SocialNetwork& net,
                          NormConvention norm = NormConvention::OffDiagonal);

/// max_i (1/lambda_i) ln((lambda_i + tanh(mbar)) / tanh(mbar)).
/// Throws DomainError for mbar <= 0 or any lambda_i <= 0.
double lemma2_min_interval(std::span<const AgentParams> params, double mbar);

/// beta_i = -e^{-lambda_i dt_D} + tanh(mbar)/lambda_i (1 - e^{-lambda_i dt_D}); beta = min_i.
/// Non-positive beta is reported through beta_positive, not thrown.
BoundReport lemma2_beta(BoundReport report, std::span<const AgentParams> params, double mbar,
                        double dt_D);

/// Hypotheses of the finite-hitting-time bound.
struct TheoremInputs {
  double zeta = 0.0; // some waiting agent has |z^{k+1}| >= zeta while the pool is nonempty
  double psi = 0.0;  // expensive-queue agents have |z^{k+1}| <= psi outside the band
  int n_agents = 0;
  double beta = 0.0;

  /// Throws DomainError unless 0 < zeta <= 1, 0 <= psi < 1, 0 < beta <= 1, N >= 1.
  void validate() const;
};

/// min over 1 <= s <= q <= N of C(q, s) beta^s (1 - psi)^(q - s).
double theorem_p_nash(int n_agents, double beta, double psi);

/// Expected-epochs bound N/zeta + 1/p_nash.  Throws DomainError unless both are positive.
double theorem_hit_bound(int n_agents, double zeta, double p_nash);

/// Expected epochs to empty the waiting pool: N/zeta.
double waiting_pool_bound(int n_agents, double zeta);

nlohmann::json to_json(const BoundReport& report);

// --- empirical checks -------------------------------------------------------

struct LemmaViolation {
  std::size_t trial = 0;
  std::size_t epoch = 0;
  std::size_t agent = 0;
  int imbalance = 0;
  double z_next = 0.0;
  std::string kind; // "sign" or "magnitude"
  std::vector<double> opinions;
  std::vector<Location> locations;
};

enum class ValidationStatus { Passed, Violated, PreconditionUnmet };

struct LemmaValidation {
  ValidationStatus status = ValidationStatus::PreconditionUnmet;
  std::string reason;
  BoundReport bounds;
  std::size_t trials = 0;
  std::size_t checks = 0;           // (epoch, agent) pairs evaluated
  std::size_t skipped_epochs = 0;   // outside band but |b_k| < b# (waiting pool nonempty)
  std::size_t sign_violations = 0;
  std::size_t magnitude_violations = 0;
  double min_aligned_opinion = 0.0; // smallest sigma_k z^{k+1}_i observed
  std::vector<LemmaViolation> dumps; // first few violations with state
};

/// Runs `trials` simulations from random imbalanced starts (every agent queued,
/// |n_A - n_B| >= 2) and checks, at each epoch outside the band, that every
/// active agent ends the interval on the cheaper queue's side with
/// |z^{k+1}| >= beta - 1e-9.  Requires the alignment condition, dt_D above the
/// minimum interval and full information (rho = 0); otherwise PreconditionUnmet.
LemmaValidation validate_lemmas_empirically(const TrialSetup& setup, std::size_t trials,
                                            std::uint64_t master_seed,
                                            NormConvention norm = NormConvention::OffDiagonal);

/// Checks one recorded trace; accumulates into `out` and returns nothing.
void check_trace_against_lemmas(const TrialTrace& trace, double beta, std::size_t trial_index,
                                LemmaValidation& out);

/// zeta: min over epochs with a nonempty waiting pool of the largest waiting
/// agent's |z^{k+1}|.  psi: max |z^{k+1}| over agents in the more expensive
/// queue at epochs outside the band with an empty waiting pool.
struct TheoremEstimates {
  std::optional<double> zeta;
  std::optional<double> psi;
};

void accumulate_theorem_estimates(const TrialTrace& trace, TheoremEstimates& est);

struct TheoremCheck {
  std::size_t trials = 0;
  std::size_t hits = 0;
  double mean_hit_epoch = 0.0;
  double stderr_hit_epoch = 0.0;
  TheoremEstimates estimates;
  double beta = 0.0;
  double p_nash = 0.0;
  double bound_epochs = 0.0;
  bool passed = false;
  std::string reason;
};

enum class StartKind {
  AllWaiting, // the setup's own initial locations (all waiting by default)
  Imbalanced, // every agent queued with |n_A - n_B| >= 2, as in the lemma check
};

/// Every agent in a queue with |n_A - n_B| >= 2; deterministic in (master_seed, trial).
std::vector<Location> imbalanced_start(std::size_t n_agents, std::uint64_t master_seed,
                                       std::uint64_t trial_index);

/// Runs `trials` simulations and compares the mean hitting epoch with
/// N/zeta + 1/p_N evaluated at the empirically measured zeta and psi.  When no
/// epoch has a nonempty waiting pool the zeta hypothesis is vacuous and zeta = 1
/// is used.  Passes when every trial hits and the one-sided 99% lower
/// confidence limit of the mean does not exceed the bound.
TheoremCheck check_theorem_consistency(const TrialSetup& setup, std::size_t trials,
                                       std::uint64_t master_seed,
                                       StartKind start = StartKind::AllWaiting,
                                       NormConvention norm = NormConvention::OffDiagonal);

} // namespace oq
