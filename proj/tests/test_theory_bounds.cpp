#include "opinion_queues/errors.hpp"
#include "opinion_queues/theory_bounds.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace oq;
using L = Location;

namespace {

TrialSetup aligned_setup(std::size_t n = 10) {
  TrialSetup s;
  s.model.params = testing::homogeneous(n, testing::aligned_params());
  s.model.network = SocialNetwork::all_negative(n);
  s.model.dt_D = 1.0;
  s.model.dt = 0.01;
  s.horizon = 40.0;
  return s;
}

} // namespace

TEST_SUITE("theory_bounds") {

TEST_CASE("margin at the reference parameters fails") {
  const auto params = testing::homogeneous(10, testing::reference_params());
  const auto r = lemma1_margin(params, SocialNetwork::all_negative(10));
  CHECK(r.infinity_norm == 9);
  // 0.5*2 - 1*1.5 - 0.2*9
  CHECK(r.mbar == doctest::Approx(-2.3));
  CHECK_FALSE(r.condition_holds);

  const auto full = lemma1_margin(params, SocialNetwork::all_negative(10), NormConvention::FullRow);
  CHECK(full.infinity_norm == 10);
  CHECK(full.mbar == doctest::Approx(-2.5));
}

TEST_CASE("margin with the aligned parameters") {
  const auto params = testing::homogeneous(10, testing::aligned_params());
  const auto r = lemma1_margin(params, SocialNetwork::all_negative(10));
  CHECK(r.mbar == doctest::Approx(5.7));
  CHECK(r.condition_holds);
  // mpmath tanh(5.7)
  CHECK(r.nu == doctest::Approx(0.99997760928098977).epsilon(1e-14));
}

TEST_CASE("minimum interval and floor examples") {
  const auto params = testing::homogeneous(10, testing::aligned_params());
  // mpmath: ln((1 + nu) / nu)
  CHECK(lemma2_min_interval(params, 5.7) == doctest::Approx(0.69315837610745780854).epsilon(1e-13));

  auto r = lemma2_beta(lemma1_margin(params, SocialNetwork::all_negative(10)), params, 5.7, 1.0);
  REQUIRE(r.beta);
  CHECK(*r.beta == doctest::Approx(0.26422696402330203916).epsilon(1e-13));
  CHECK(r.beta_positive);
  CHECK(r.beta_i.size() == 10);

  auto hetero = params;
  hetero[3].lambda = 2.0;
  CHECK(lemma2_min_interval(hetero, 5.7) == doctest::Approx(0.6931583761).epsilon(1e-9));

  const auto short_dt = lemma2_beta(r, params, 5.7, 0.5);
  CHECK(*short_dt.beta < 0);
  CHECK_FALSE(short_dt.beta_positive);
}

TEST_CASE("floor vanishes exactly at the threshold") {
  std::vector<AgentParams> params(1, testing::aligned_params());
  for (double lambda : {0.5, 1.0, 2.0, 5.0}) {
    params[0].lambda = lambda;
    for (double mbar : {0.1, 1.0, 5.7}) {
      const double thr = lemma2_min_interval(params, mbar);
      const auto r = lemma2_beta(BoundReport{}, params, mbar, thr);
      CHECK(std::abs(*r.beta) < 1e-12);
    }
  }
}

TEST_CASE("floor is increasing in mbar and dt_D") {
  std::vector<AgentParams> params(1, testing::aligned_params());
  for (double lambda : {0.5, 1.0, 3.0}) {
    params[0].lambda = lambda;
    double prev_m = -2.0;
    for (double mbar = 0.2; mbar <= 6.0; mbar += 0.2) {
      const double b = *lemma2_beta(BoundReport{}, params, mbar, 1.0).beta;
      CHECK(b > prev_m);
      prev_m = b;
    }
    const double nu_over_lambda = std::tanh(2.0) / lambda;
    double prev_t = -2.0;
    for (double dt = 0.1; dt <= 5.0; dt += 0.1) {
      const double b = *lemma2_beta(BoundReport{}, params, 2.0, dt).beta;
      CHECK(b > prev_t);
      CHECK(b < nu_over_lambda);
      prev_t = b;
    }
  }
}

TEST_CASE("nash probability and hitting bound") {
  CHECK(theorem_p_nash(2, 0.26, 0.9) == doctest::Approx(0.052).epsilon(1e-14));
  CHECK(theorem_hit_bound(10, 0.2, 0.052) == doctest::Approx(69.23076923076923).epsilon(1e-14));
  CHECK(waiting_pool_bound(10, 0.5) == doctest::Approx(20.0));
  CHECK(theorem_p_nash(1, 0.4, 0.3) == doctest::Approx(0.4));

  // Monotone: more agents or a larger psi never raise p_N; a larger beta never lowers it.
  for (int n = 1; n < 12; ++n) {
    for (double beta : {0.1, 0.5, 0.9})
      for (double psi : {0.0, 0.3, 0.8}) {
        const double p = theorem_p_nash(n, beta, psi);
        CHECK(p > 0);
        CHECK(p <= beta);
        CHECK(theorem_p_nash(n + 1, beta, psi) <= p);
        CHECK(theorem_p_nash(n, beta, std::min(psi + 0.1, 0.99)) <= p);
        CHECK(theorem_p_nash(n, std::min(beta + 0.05, 1.0), psi) >= p);
      }
  }
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(theorem_p_nash(0, 0.5, 0.5), DomainError);
  CHECK_THROWS_AS(theorem_p_nash(3, 0.0, 0.5), DomainError);
  CHECK_THROWS_AS(theorem_p_nash(3, 0.5, 1.0), DomainError);
  CHECK_NOTHROW(theorem_p_nash(3, 0.5, 0.0));
  CHECK_THROWS_AS(theorem_hit_bound(3, 0.0, 0.5), DomainError);
  CHECK_THROWS_AS(theorem_hit_bound(3, 0.5, 0.0), DomainError);
  const auto params = testing::homogeneous(2, testing::aligned_params());
  CHECK_THROWS_AS(lemma2_min_interval(params, 0.0), DomainError);
  auto zero_lambda = params;
  zero_lambda[0].lambda = 0.0;
  CHECK_THROWS_AS(lemma2_min_interval(zero_lambda, 1.0), DomainError);

  TheoremInputs in{0.5, 0.2, 10, 0.3};
  CHECK_NOTHROW(in.validate());
  in.zeta = 1.5;
  CHECK_THROWS_AS(in.validate(), DomainError);
}

TEST_CASE("report json carries every field") {
  const auto params = testing::homogeneous(10, testing::aligned_params());
  const auto r = lemma2_beta(lemma1_margin(params, SocialNetwork::all_negative(10)), params, 5.7, 1.0);
  const auto j = to_json(r);
  for (const char* key : {"b_sharp", "infinity_norm", "margins", "mbar", "nu", "condition_holds",
                          "mbar_used", "dtD_threshold", "dt_D", "beta_i", "beta", "beta_positive"}) {
    CHECK(j.contains(key));
  }
  CHECK(to_json(lemma1_margin(params, SocialNetwork::all_negative(10)))["beta"].is_null());
}

TEST_CASE("in-band traces produce no lemma checks") {
  TrialTrace tr;
  tr.n_agents = 2;
  tr.informed = {true, true};
  for (int k = 0; k < 4; ++k) {
    EpochRecord r;
    r.t = k;
    r.n_A = r.n_B = 1;
    r.in_band = true;
    r.opinions = {0.5, -0.5};
    r.locations = {L::QueueA, L::QueueB};
    tr.records.push_back(r);
  }
  LemmaValidation v;
  check_trace_against_lemmas(tr, 0.26, 0, v);
  CHECK(v.checks == 0);
  CHECK(v.sign_violations == 0);
}

TEST_CASE("violations are detected and dumped") {
  TrialTrace tr;
  tr.n_agents = 3;
  tr.informed = {true, true, false};
  EpochRecord a;
  a.t = 0;
  a.n_A = 3;
  a.opinions = {0.5, 0.5, 0.5};
  a.locations = {L::QueueA, L::QueueA, L::QueueA};
  EpochRecord b = a;
  b.t = 1;
  b.opinions = {-0.9, 0.1, 0.9}; // agent 0 fine, agent 1 wrong sign, agent 2 masked
  tr.records = {a, b};
  LemmaValidation v;
  check_trace_against_lemmas(tr, 0.26, 4, v);
  CHECK(v.checks == 2);
  CHECK(v.sign_violations == 1);
  REQUIRE(v.dumps.size() >= 1);
  CHECK(v.dumps[0].trial == 4);
  CHECK(v.dumps[0].agent == 1);
}

TEST_CASE("empirical validation reports unmet preconditions") {
  const auto reference = testing::reference_setup(SocialNetwork::all_negative(10));
  auto v = validate_lemmas_empirically(reference, 5, 1);
  CHECK(v.status == ValidationStatus::PreconditionUnmet);
  CHECK_FALSE(v.reason.empty());

  auto s = aligned_setup();
  s.model.dt_D = 0.5;
  s.horizon = 10.0;
  v = validate_lemmas_empirically(s, 5, 1);
  CHECK(v.status == ValidationStatus::PreconditionUnmet);

  s = aligned_setup();
  s.rho = 0.2;
  v = validate_lemmas_empirically(s, 5, 1);
  CHECK(v.status == ValidationStatus::PreconditionUnmet);
}

TEST_CASE("empirical validation passes in the aligned regime") {
  const auto v = validate_lemmas_empirically(aligned_setup(), 20, 3);
  CHECK(v.status == ValidationStatus::Passed);
  CHECK(v.checks > 0);
  CHECK(v.sign_violations == 0);
  CHECK(v.magnitude_violations == 0);
  CHECK(v.min_aligned_opinion >= *v.bounds.beta - 1e-9);
}

TEST_CASE("imbalanced starts are queued and outside the band") {
  for (std::uint64_t t = 0; t < 50; ++t) {
    const auto start = imbalanced_start(10, 7, t);
    int b = 0;
    for (auto l : start) {
      CHECK(in_queue(l));
      b += location_code(l);
    }
    CHECK(std::abs(b) >= 2);
  }
  CHECK(imbalanced_start(10, 7, 3) == imbalanced_start(10, 7, 3));
  CHECK_THROWS_AS(imbalanced_start(1, 7, 0), std::invalid_argument);
}

TEST_CASE("theorem check from imbalanced starts") {
  const auto c = check_theorem_consistency(aligned_setup(), 30, 5, StartKind::Imbalanced);
  CHECK(c.trials == 30);
  CHECK(c.hits == 30);
  CHECK_FALSE(c.estimates.zeta.has_value());
  REQUIRE(c.estimates.psi);
  CHECK(*c.estimates.psi < 1.0);
  CHECK(c.bound_epochs > c.mean_hit_epoch);
  CHECK(c.passed);
}

TEST_CASE("theorem check reports censored trials") {
  auto s = aligned_setup();
  s.horizon = 8.0;
  const auto c = check_theorem_consistency(s, 30, 5, StartKind::AllWaiting);
  INFO(c.reason);
  CHECK(c.hits > 0);
  CHECK(c.hits < c.trials);
  CHECK_FALSE(c.passed);
  CHECK(c.reason.find("censored") != std::string::npos);
}

} // TEST_SUITE
