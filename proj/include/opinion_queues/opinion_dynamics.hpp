#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace oq {

/// Coefficients of one agent's opinion ODE
///   dz_i/dt = -lambda z_i + tanh(omega u_i z_i + alpha sum_{j!=i} a_ij z_j - gamma b_i),
///   u_i = u0 + K z_i^2.
struct AgentParams {
  double lambda = 1.0;
  double omega = 1.0;
  double gamma = 0.5;
  double alpha = 0.2;
  double u0 = 1.25;
  double K = 0.25;

  /// Throws ConfigError naming the first negative coefficient.
  void validate() const;

  bool operator==(const AgentParams&) const = default;
};

/// Signed N x N adjacency with entries in {-1, 0, +1}.  The diagonal is stored
/// (it matters for the eigenvalue) but never enters the coupling sum.
class SocialNetwork {
public:
  SocialNetwork() = default;
  /// Row-major entries; throws ConfigError on size mismatch or entries outside {-1,0,1}.
  SocialNetwork(std::size_t n, std::vector<int> entries);

  static SocialNetwork all_positive(std::size_t n); // 11^T
  static SocialNetwork all_negative(std::size_t n); // -11^T
  static SocialNetwork empty(std::size_t n);
  static SocialNetwork from_rows(const std::vector<std::vector<int>>& rows);

  std::size_t size() const { return n_; }
  int at(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }

  /// out_i = sum_{j != i} a_ij z_j.
  void coupling(std::span<const double> z, std::span<double> out) const;

  /// Row-sum norm max_i sum_j |a_ij|, with or without the diagonal.
  int infinity_norm(bool include_diagonal) const;

  bool is_symmetric() const;

  /// Same matrix with agents relabeled: result(p[i], p[j]) = this(i, j).
  SocialNetwork permuted(std::span<const std::size_t> perm) const;

  bool operator==(const SocialNetwork& o) const { return n_ == o.n_ && entries_ == o.entries_; }

private:
  void classify();

  std::size_t n_ = 0;
  std::vector<std::int8_t> entries_;
  // All off-diagonal entries equal to uniform_value_: O(N) coupling.
  bool uniform_ = false;
  int uniform_value_ = 0;
};

/// Opinion vector with every component in [-1, 1].
class OpinionVector {
public:
  OpinionVector() = default;
  /// Throws std::invalid_argument if any component is outside [-1, 1] or NaN.
  explicit OpinionVector(std::vector<double> z);

  /// Clamps into [-1, 1]; adds the number of clamped components to *clamped.
  static OpinionVector clamped(std::vector<double> z, std::size_t* clamped = nullptr);

  std::size_t size() const { return z_.size(); }
  double operator[](std::size_t i) const { return z_[i]; }
  std::span<const double> values() const { return z_; }
  const std::vector<double>& vector() const { return z_; }

  bool operator==(const OpinionVector&) const = default;

private:
  std::vector<double> z_;
};

/// u0 + K z^2.
double attention(const AgentParams& p, double z_i);

/// Right-hand side of agent i's opinion ODE with z_hat = z.
/// Throws std::out_of_range for a bad index or mismatched sizes.
double opinion_rhs(std::size_t i, std::span<const double> z, std::span<const AgentParams> params,
                   const SocialNetwork& net, double b_i);

struct IntegrationDiagnostics {
  double max_abs = 0.0;      // largest |z_i| seen at any substep boundary
  std::size_t substeps = 0;
};

/// Number of substeps dt_D / dt; throws ConfigError unless it is a positive integer.
std::size_t substep_count(double dt_D, double dt);

/// Integrates all opinions over one decision interval of length dt_D with the
/// per-agent inputs b held fixed, using Dormand-Prince 5(4) at fixed step dt
/// (5th-order solution, no error control).  The result is not clamped.
/// Throws NumericError if a non-finite value appears.
std::vector<double> integrate_decision_interval(std::span<const double> z_k,
                                                std::span<const AgentParams> params,
                                                const SocialNetwork& net,
                                                std::span<const double> b, double dt_D, double dt,
                                                IntegrationDiagnostics* diag = nullptr);

/// Largest real part among the eigenvalues of the stored matrix (diagonal included).
double largest_eigenvalue(const SocialNetwork& net);

/// Basal attention at which neutrality destabilizes: (lambda - alpha sigma(A)) / omega.
double critical_attention(const AgentParams& p, const SocialNetwork& net);

/// Attention gain below which the pitchfork is supercritical: lambda^3 / (3 omega).
double critical_gain(const AgentParams& p);

} // namespace oq
