#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "nomafair/model.hpp"

namespace nomafair {

// Superposition downlink with successive interference cancellation: decoder i
// removes flows 1..m-1 before decoding flow m (m <= i), leaving flows m+1..N
// as interference:
//
//   R_{i,m} = log2(1 + beta_m P g_i / (P g_i sum_{k>m} beta_k + sigma_n^2)).

/// Rate at which decoder `i` (1-based) receives flow `m` (1-based, m <= i).
inline double achievable_rate(const PowerAllocation& alloc, const ChannelRealization& chan,
                              const SystemConfig& cfg, int i, int m) {
  if (m < 1 || i < m || i > chan.size() || alloc.size() != chan.size())
    throw std::out_of_range("achievable_rate: bad decoder/flow index");
  const double pg = cfg.total_power * chan[static_cast<std::size_t>(i - 1)];
  double interference = 0.0;
  for (int k = m + 1; k <= alloc.size(); ++k)
    interference += alloc[static_cast<std::size_t>(k - 1)];
  const double sinr = alloc[static_cast<std::size_t>(m - 1)] * pg /
                      (pg * interference + cfg.noise_variance);
  return std::log2(1.0 + sinr);
}

/// Worst own-flow rate min_i R_{i,i}; the max-min objective.
inline double min_own_rate(const PowerAllocation& alloc, const ChannelRealization& chan,
                           const SystemConfig& cfg) {
  if (alloc.size() != chan.size() || chan.size() == 0)
    throw std::out_of_range("min_own_rate: empty or mismatched inputs");
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= chan.size(); ++i)
    worst = std::min(worst, achievable_rate(alloc, chan, cfg, i, i));
  return worst;
}

/// Minimum gains required to decode at the target rate. zeta[i] is the gain
/// below which flow i+1 fails at its own decoder; zeta_hat is the running
/// prefix maximum, the gain below which user i+1 is in outage.
struct DecodingThresholds {
  std::vector<double> zeta;      // +infinity where the power split cannot reach the rate
  std::vector<double> zeta_hat;  // prefix maxima of zeta, non-decreasing
  std::vector<bool> feasible;    // beta_i > rhat * sum_{l>i} beta_l, per user
};

inline DecodingThresholds decoding_thresholds(const PowerAllocation& alloc,
                                              const SystemConfig& cfg) {
  const int n = alloc.size();
  if (n != cfg.n_users) throw InvalidConfig("beta", "allocation size must match n_users");
  const double rhat = cfg.rate_threshold();
  constexpr double inf = std::numeric_limits<double>::infinity();

  DecodingThresholds th;
  th.zeta.assign(static_cast<std::size_t>(n), inf);
  th.zeta_hat.assign(static_cast<std::size_t>(n), inf);
  th.feasible.assign(static_cast<std::size_t>(n), false);

  // suffix[i] = sum_{l > i} beta_l, accumulated backward to stay O(N)
  double suffix = 0.0;
  std::vector<double> margin(static_cast<std::size_t>(n));
  for (int i = n - 1; i >= 0; --i) {
    const double interference = rhat * suffix;
    margin[static_cast<std::size_t>(i)] = alloc[static_cast<std::size_t>(i)] - interference;
    // strict inequality with relative slack; at the boundary the SINR ceiling
    // equals the threshold and the rate is unreachable
    const double scale = std::max(alloc[static_cast<std::size_t>(i)], interference);
    th.feasible[static_cast<std::size_t>(i)] =
        margin[static_cast<std::size_t>(i)] > 1e-12 * scale && margin[static_cast<std::size_t>(i)] > 0.0;
    suffix += alloc[static_cast<std::size_t>(i)];
  }

  double running_max = 0.0;
  for (int i = 0; i < n; ++i) {
    if (th.feasible[static_cast<std::size_t>(i)])
      th.zeta[static_cast<std::size_t>(i)] =
          cfg.noise_variance * rhat / (cfg.total_power * margin[static_cast<std::size_t>(i)]);
    running_max = std::max(running_max, th.zeta[static_cast<std::size_t>(i)]);
    th.zeta_hat[static_cast<std::size_t>(i)] = running_max;
  }
  return th;
}

}  // namespace nomafair
