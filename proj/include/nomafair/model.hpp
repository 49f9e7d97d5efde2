#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nomafair {

/// Raised when a configuration field or a domain type violates its invariant.
/// Carries the name of the offending field.
class InvalidConfig : public std::invalid_argument {
 public:
  InvalidConfig(std::string field, const std::string& message)
      : std::invalid_argument(message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// System parameters for an N-user downlink cell. Powers and variances are
/// linear (watts), rates are bits per channel use.
struct SystemConfig {
  int n_users = 1;
  double total_power = 1.0;       // P
  double channel_variance = 1.0;  // sigma_h^2, Rayleigh power-gain mean
  double noise_variance = 1.0;    // sigma_n^2
  double target_rate = 0.05;      // r0, BPCU
  double bisect_tol = 1e-6;       // outer bisection bracket tolerance
  double root_tol = 1e-12;        // 1-D root solves and final polish
  int max_iters = 200;

  // Rayleigh rate parameter; derived so it can never disagree with the variance.
  double lambda() const { return 1.0 / channel_variance; }
  // SINR threshold 2^{r0} - 1 equivalent to the rate target.
  double rate_threshold() const { return std::exp2(target_rate) - 1.0; }
};

inline void validate_config(const SystemConfig& cfg) {
  if (cfg.n_users < 1) throw InvalidConfig("n_users", "n_users must be >= 1");
  if (!(cfg.total_power > 0.0) || !std::isfinite(cfg.total_power))
    throw InvalidConfig("total_power", "total_power must be positive and finite");
  if (!(cfg.channel_variance > 0.0) || !std::isfinite(cfg.channel_variance))
    throw InvalidConfig("channel_variance", "channel_variance must be positive and finite");
  if (!(cfg.noise_variance > 0.0) || !std::isfinite(cfg.noise_variance))
    throw InvalidConfig("noise_variance", "noise_variance must be positive and finite");
  if (!(cfg.target_rate > 0.0) || !std::isfinite(cfg.target_rate))
    throw InvalidConfig("target_rate", "target_rate must be positive and finite");
  if (!(cfg.bisect_tol > 0.0)) throw InvalidConfig("bisect_tol", "bisect_tol must be positive");
  if (!(cfg.root_tol > 0.0)) throw InvalidConfig("root_tol", "root_tol must be positive");
  if (cfg.max_iters < 1) throw InvalidConfig("max_iters", "max_iters must be >= 1");
}

/// Instantaneous power gains |h_i|^2, strictly positive and sorted ascending:
/// index i always refers to the (i+1)-th weakest link.
class ChannelRealization {
 public:
  ChannelRealization() = default;
  explicit ChannelRealization(std::vector<double> gains) : gains_(std::move(gains)) {
    for (std::size_t i = 0; i < gains_.size(); ++i) {
      if (!(gains_[i] > 0.0) || !std::isfinite(gains_[i]))
        throw InvalidConfig("gains", "channel gains must be positive and finite");
      if (i > 0 && gains_[i] < gains_[i - 1])
        throw InvalidConfig("gains", "channel gains must be sorted ascending");
    }
  }

  const std::vector<double>& gains() const noexcept { return gains_; }
  double operator[](std::size_t i) const { return gains_[i]; }
  int size() const noexcept { return static_cast<int>(gains_.size()); }

 private:
  std::vector<double> gains_;
};

/// Fractions of the total power assigned to each superimposed data flow.
/// Entries are non-negative and the total may not exceed the unit budget by
/// more than `budget_tol`.
class PowerAllocation {
 public:
  PowerAllocation() = default;
  explicit PowerAllocation(std::vector<double> beta, double budget_tol = 1e-6)
      : beta_(std::move(beta)) {
    double sum = 0.0;
    for (double b : beta_) {
      if (!(b >= 0.0) || !std::isfinite(b))
        throw InvalidConfig("beta", "power fractions must be non-negative and finite");
      sum += b;
    }
    if (sum > 1.0 + budget_tol)
      throw InvalidConfig("beta", "power fractions exceed the unit budget");
  }

  const std::vector<double>& beta() const noexcept { return beta_; }
  double operator[](std::size_t i) const { return beta_[i]; }
  int size() const noexcept { return static_cast<int>(beta_.size()); }
  double sum() const noexcept {
    double s = 0.0;
    for (double b : beta_) s += b;
    return s;
  }

 private:
  std::vector<double> beta_;
};

/// Outcome of a bisection solve. `objective` is a fairness rate in BPCU or an
/// outage probability depending on the solver.
struct SolverResult {
  double objective = 0.0;
  PowerAllocation allocation;
  int iterations = 0;
  bool converged = false;
  double bracket_width = 0.0;  // final upper minus lower bound
};

inline double db_to_linear(double x_db) { return std::pow(10.0, x_db / 10.0); }

inline double linear_to_db(double x) {
  if (!(x > 0.0)) throw DomainError("linear_to_db requires a positive argument");
  return 10.0 * std::log10(x);
}

}  // namespace nomafair
