#include "opinion_queues/opinion_dynamics.hpp"

#include "opinion_queues/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace oq {

void AgentParams::validate() const {
  auto require = [](double v, const char* name) {
    if (!std::isfinite(v)) {
      throw ConfigError(std::string(name) + " must be finite");
    }
  };
  require(lambda, "lambda");
  require(omega, "omega");
  require(gamma, "gamma");
  require(alpha, "alpha");
  require(u0, "u0");
  require(K, "K");
  if (lambda < 0) throw ConfigError("lambda must be >= 0");
  if (omega < 0) throw ConfigError("omega must be >= 0");
  if (alpha < 0) throw ConfigError("alpha must be >= 0");
  if (K < 0) throw ConfigError("K must be >= 0");
}

// --- SocialNetwork ---------------------------------------------------------

SocialNetwork::SocialNetwork(std::size_t n, std::vector<int> entries) : n_(n) {
  if (n == 0) throw ConfigError("network: agent count must be positive");
  if (entries.size() != n * n) {
    throw ConfigError("network: expected " + std::to_string(n * n) + " entries, got " +
                      std::to_string(entries.size()));
  }
  entries_.reserve(entries.size());
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const int a = entries[k];
    if (a < -1 || a > 1) {
      throw ConfigError("network: entry (" + std::to_string(k / n) + "," + std::to_string(k % n) +
                        ") = " + std::to_string(a) + " is not in {-1, 0, 1}");
    }
    entries_.push_back(static_cast<std::int8_t>(a));
  }
  classify();
}

SocialNetwork SocialNetwork::all_positive(std::size_t n) {
  return SocialNetwork(n, std::vector<int>(n * n, 1));
}

SocialNetwork SocialNetwork::all_negative(std::size_t n) {
  return SocialNetwork(n, std::vector<int>(n * n, -1));
}

SocialNetwork SocialNetwork::empty(std::size_t n) {
  return SocialNetwork(n, std::vector<int>(n * n, 0));
}

SocialNetwork SocialNetwork::from_rows(const std::vector<std::vector<int>>& rows) {
  const std::size_t n = rows.size();
  std::vector<int> flat;
  flat.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) {
      throw ConfigError("network: row " + std::to_string(i) + " has " +
                        std::to_string(rows[i].size()) + " entries, expected " + std::to_string(n));
    }
    flat.insert(flat.end(), rows[i].begin(), rows[i].end());
  }
  return SocialNetwork(n, std::move(flat));
}

void SocialNetwork::classify() {
  uniform_ = true;
  uniform_value_ = n_ > 1 ? entries_[1] : 0;
  for (std::size_t i = 0; i < n_ && uniform_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      if (i != j && entries_[i * n_ + j] != uniform_value_) {
        uniform_ = false;
        break;
      }
    }
  }
}

void SocialNetwork::coupling(std::span<const double> z, std::span<double> out) const {
  if (uniform_) {
    if (uniform_value_ == 0) {
      std::fill(out.begin(), out.end(), 0.0);
      return;
    }
    double total = 0.0;
    for (double v : z) total += v;
    const double c = uniform_value_;
    for (std::size_t i = 0; i < n_; ++i) out[i] = c * (total - z[i]);
    return;
  }
  for (std::size_t i = 0; i < n_; ++i) {
    const std::int8_t* row = &entries_[i * n_];
    double s = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      if (j != i) s += row[j] * z[j];
    }
    out[i] = s;
  }
}

int SocialNetwork::infinity_norm(bool include_diagonal) const {
  int best = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    int s = 0;
    for (std::size_t j = 0; j < n_; ++j) {
      if (include_diagonal || i != j) s += std::abs(entries_[i * n_ + j]);
    }
    best = std::max(best, s);
  }
  return best;
}

bool SocialNetwork::is_symmetric() const {
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j)
      if (entries_[i * n_ + j] != entries_[j * n_ + i]) return false;
  return true;
}

SocialNetwork SocialNetwork::permuted(std::span<const std::size_t> perm) const {
  if (perm.size() != n_) throw std::invalid_argument("permutation size mismatch");
  std::vector<int> out(n_ * n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) out[perm[i] * n_ + perm[j]] = entries_[i * n_ + j];
  return SocialNetwork(n_, std::move(out));
}

// --- OpinionVector ---------------------------------------------------------

OpinionVector::OpinionVector(std::vector<double> z) : z_(std::move(z)) {
  for (std::size_t i = 0; i < z_.size(); ++i) {
    if (!(std::abs(z_[i]) <= 1.0)) {
      throw std::invalid_argument("opinion " + std::to_string(i) + " = " + std::to_string(z_[i]) +
                                  " is outside [-1, 1]");
    }
  }
}

OpinionVector OpinionVector::clamped(std::vector<double> z, std::size_t* clamped) {
  std::size_t count = 0;
  for (double& v : z) {
    if (std::isnan(v)) throw NumericError("cannot clamp NaN opinion");
    if (v > 1.0 || v < -1.0) {
      v = std::clamp(v, -1.0, 1.0);
      ++count;
    }
  }
  if (clamped) *clamped += count;
  return OpinionVector(std::move(z));
}

// --- dynamics ----------------------------------------------------------------

double attention(const AgentParams& p, double z_i) { return p.u0 + p.K * z_i * z_i; }

namespace {

// tanh through a single exp: about 3x cheaper than libm's expm1-based tanh,
// exactly odd, exactly 0 at 0, absolute error ~1e-16.
inline double fast_tanh(double x) {
  const double t = 1.0 - 2.0 / (std::exp(2.0 * std::abs(x)) + 1.0);
  return std::copysign(t, x);
}

inline double agent_rhs(const AgentParams& p, double z_i, double social, double b_i) {
  return -p.lambda * z_i + fast_tanh(p.omega * attention(p, z_i) * z_i + p.alpha * social -
                                     p.gamma * b_i);
}

void check_sizes(std::size_t n, std::span<const AgentParams> params, const SocialNetwork& net,
                 std::size_t b_size) {
  if (params.size() != n || net.size() != n || b_size != n) {
    std::ostringstream os;
    os << "size mismatch: z=" << n << " params=" << params.size() << " network=" << net.size()
       << " inputs=" << b_size;
    throw std::out_of_range(os.str());
  }
}

// Full right-hand side for all agents; scratch holds the coupling sums.
void full_rhs(std::span<const double> z, std::span<const AgentParams> params,
              const SocialNetwork& net, std::span<const double> b, std::span<double> scratch,
              std::span<double> out) {
  net.coupling(z, scratch);
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = agent_rhs(params[i], z[i], scratch[i], b[i]);
}

[[noreturn]] void report_non_finite(std::span<const double> z_k, std::span<const double> b,
                                    std::span<const double> y, std::size_t step, double dt) {
  std::ostringstream os;
  os.precision(17);
  os << "non-finite opinion after substep " << step << " (t = " << step * dt
     << " into the interval); start z = [";
  for (std::size_t i = 0; i < z_k.size(); ++i) os << (i ? ", " : "") << z_k[i];
  os << "], b = [";
  for (std::size_t i = 0; i < b.size(); ++i) os << (i ? ", " : "") << b[i];
  os << "], current z = [";
  for (std::size_t i = 0; i < y.size(); ++i) os << (i ? ", " : "") << y[i];
  os << "]";
  throw NumericError(os.str());
}

// Dormand-Prince 5(4) tableau; only the 5th-order weights are used.
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;

} // namespace

double opinion_rhs(std::size_t i, std::span<const double> z, std::span<const AgentParams> params,
                   const SocialNetwork& net, double b_i) {
  if (params.size() != z.size() || net.size() != z.size()) {
    throw std::out_of_range("opinion_rhs: size mismatch between opinions, params and network");
  }
  if (i >= z.size()) {
    throw std::out_of_range("opinion_rhs: agent index " + std::to_string(i) + " out of range");
  }
  double social = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j) {
    if (j != i) social += net.at(i, j) * z[j];
  }
  return agent_rhs(params[i], z[i], social, b_i);
}

std::size_t substep_count(double dt_D, double dt) {
  if (!(dt_D > 0) || !std::isfinite(dt_D)) throw ConfigError("dt_D must be positive");
  if (!(dt > 0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
  const double ratio = dt_D / dt;
  const double rounded = std::round(ratio);
  if (rounded < 1 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    std::ostringstream os;
    os << "dt_D / dt = " << dt_D << " / " << dt << " is not a positive integer";
    throw ConfigError(os.str());
  }
  return static_cast<std::size_t>(rounded);
}

std::vector<double> integrate_decision_interval(std::span<const double> z_k,
                                                std::span<const AgentParams> params,
                                                const SocialNetwork& net,
                                                std::span<const double> b, double dt_D, double dt,
                                                IntegrationDiagnostics* diag) {
  const std::size_t n = z_k.size();
  check_sizes(n, params, net, b.size());
  const std::size_t steps = substep_count(dt_D, dt);
  const double h = dt_D / static_cast<double>(steps);

  std::vector<double> y(z_k.begin(), z_k.end());
  std::vector<double> buf(8 * n);
  std::span<double> k1(&buf[0 * n], n), k2(&buf[1 * n], n), k3(&buf[2 * n], n),
      k4(&buf[3 * n], n), k5(&buf[4 * n], n), k6(&buf[5 * n], n), tmp(&buf[6 * n], n),
      scratch(&buf[7 * n], n);

  double max_abs = 0.0;
  for (double v : y) max_abs = std::max(max_abs, std::abs(v));

  for (std::size_t s = 0; s < steps; ++s) {
    full_rhs(y, params, net, b, scratch, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    full_rhs(tmp, params, net, b, scratch, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    full_rhs(tmp, params, net, b, scratch, k3);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    full_rhs(tmp, params, net, b, scratch, k4);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    full_rhs(tmp, params, net, b, scratch, k5);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    full_rhs(tmp, params, net, b, scratch, k6);

    bool finite = true;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] += h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
      finite = finite && std::isfinite(y[i]);
      max_abs = std::max(max_abs, std::abs(y[i]));
    }
    if (!finite) report_non_finite(z_k, b, y, s + 1, h);
  }

  if (diag) {
    diag->max_abs = std::max(diag->max_abs, max_abs);
    diag->substeps += steps;
  }
  return y;
}

double largest_eigenvalue(const SocialNetwork& net) {
  const auto n = static_cast<Eigen::Index>(net.size());
  if (n == 0) return 0.0;
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      a(i, j) = net.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));

  double best;
  if (net.is_symmetric()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::EigenvaluesOnly);
    best = solver.eigenvalues().maxCoeff();
  } else {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(a, false);
    best = solver.eigenvalues().real().maxCoeff();
  }
  // Exact zeros come back as ~1e-15 noise.
  if (std::abs(best) < 1e-12) best = 0.0;
  return best;
}

double critical_attention(const AgentParams& p, const SocialNetwork& net) {
  if (!(p.omega > 0)) throw DomainError("critical attention undefined for omega = 0");
  return (p.lambda - p.alpha * largest_eigenvalue(net)) / p.omega;
}

double critical_gain(const AgentParams& p) {
  if (!(p.omega > 0)) throw DomainError("critical gain undefined for omega = 0");
  return p.lambda * p.lambda * p.lambda / (3.0 * p.omega);
}

} // namespace oq
