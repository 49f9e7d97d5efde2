#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "nomafair/model.hpp"
#include "nomafair/noma_core.hpp"

namespace nomafair {

// Max-min fairness under instantaneous gains. For a fixed rate target t the
// cheapest allocation holds every own-flow rate at exactly t, which collapses
// the feasibility subproblem to one backward pass:
//
//   beta_i = (2^t - 1)/(P g_i) * (P g_i sum_{l>i} beta_l + sigma_n^2),
//   i = N..1.
//
// Total required power is strictly increasing in t, so bisection on t against
// the unit budget is exact.

/// Minimum-power allocation giving every user own-rate exactly `t`.
/// Unnormalized: the entries are non-negative but may sum past the budget;
/// the caller decides feasibility.
inline std::vector<double> allocate_for_rate(double t, const ChannelRealization& chan,
                                             const SystemConfig& cfg) {
  if (!(t >= 0.0)) throw DomainError("rate target must be non-negative");
  const int n = chan.size();
  const double a = std::exp2(t) - 1.0;
  std::vector<double> beta(static_cast<std::size_t>(n), 0.0);
  double suffix = 0.0;  // sum of beta over stronger users, running
  for (int i = n - 1; i >= 0; --i) {
    const double pg = cfg.total_power * chan[static_cast<std::size_t>(i)];
    beta[static_cast<std::size_t>(i)] = a * (suffix + cfg.noise_variance / pg);
    suffix += beta[static_cast<std::size_t>(i)];
  }
  return beta;
}

/// Optimal max-min rate and its allocation for one channel realization.
inline SolverResult solve_maxmin(const ChannelRealization& chan, const SystemConfig& cfg) {
  validate_config(cfg);
  if (chan.size() != cfg.n_users)
    throw InvalidConfig("gains", "realization size must match n_users");

  const int n = chan.size();
  double t_lb = 0.0;
  double t_ub = std::log2(1.0 + cfg.total_power * chan[static_cast<std::size_t>(n - 1)] /
                                    cfg.noise_variance);

  std::vector<double> best = allocate_for_rate(0.0, chan, cfg);  // always feasible
  // bisect past bisect_tol down to root scale so the returned rate and its
  // allocation hold at root_tol precision
  const double width_tol = std::min(cfg.bisect_tol, 0.5 * cfg.root_tol);

  int iters = 0;
  while (t_ub - t_lb >= width_tol && iters < cfg.max_iters) {
    ++iters;
    const double t = 0.5 * (t_ub + t_lb);
    std::vector<double> beta = allocate_for_rate(t, chan, cfg);
    double total = 0.0;
    for (double b : beta) total += b;
    if (total <= 1.0) {
      t_lb = t;
      best = std::move(beta);
    } else {
      t_ub = t;
    }
  }

  SolverResult res;
  res.objective = t_lb;
  res.allocation = PowerAllocation(std::move(best), cfg.bisect_tol);
  res.iterations = iters;
  res.bracket_width = t_ub - t_lb;
  res.converged = res.bracket_width <= cfg.bisect_tol;
  return res;
}

}  // namespace nomafair
