#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "nomafair/model.hpp"
#include "nomafair/ordered_channel.hpp"

namespace nomafair {

// Min-max outage under average channel knowledge. For a fixed outage target t
// the problem splits into independent per-user threshold equations
// F_i(zeta_i) = t (each solved by monotone 1-D root search on the ordered
// CDF), followed by backward substitution
//
//   beta_i = sigma_n^2 rhat / (P zeta_i) + rhat * sum_{k>i} beta_k,
//   i = N..1.
//
// Total required power is strictly decreasing in t, so bisection on t against
// the unit budget yields the optimum; at the optimum every user sits at
// outage exactly t.

struct OutageAllocation {
  std::vector<double> beta;  // unnormalized; sum may exceed the budget
  std::vector<double> zeta;  // per-user gain thresholds, non-decreasing
};

namespace detail {
inline OutageAllocation allocate_for_outage_impl(double t, const SystemConfig& cfg,
                                                 const std::vector<double>* warm) {
  if (!(t > 0.0) || !(t < 1.0)) throw DomainError("outage target must lie in (0, 1)");

  const int n = cfg.n_users;
  const double rhat = cfg.rate_threshold();
  OutageAllocation out;
  out.zeta.resize(static_cast<std::size_t>(n));
  out.beta.resize(static_cast<std::size_t>(n));

  // the per-user root solves are independent of one another
  for (int i = 1; i <= n; ++i) {
    const double guess = warm ? (*warm)[static_cast<std::size_t>(i - 1)] : 0.0;
    out.zeta[static_cast<std::size_t>(i - 1)] =
        ordered_cdf_inverse(t, i, n, cfg.lambda(), cfg.root_tol, guess);
  }

  double suffix = 0.0;
  for (int i = n - 1; i >= 0; --i) {
    out.beta[static_cast<std::size_t>(i)] =
        cfg.noise_variance * rhat / (cfg.total_power * out.zeta[static_cast<std::size_t>(i)]) +
        rhat * suffix;
    suffix += out.beta[static_cast<std::size_t>(i)];
  }
  return out;
}
}  // namespace detail

inline OutageAllocation allocate_for_outage(double t, const SystemConfig& cfg) {
  validate_config(cfg);
  return detail::allocate_for_outage_impl(t, cfg, nullptr);
}

struct OutageSolveResult {
  double objective = 1.0;    // min-max outage t*
  std::vector<double> beta;  // allocation at t*
  std::vector<double> zeta;  // thresholds at t*
  int iterations = 0;
  bool converged = false;
  double bracket_width = 0.0;
  // set when even driving every threshold to the far tail cannot fit the
  // budget; the result then reports the boundary target
  bool infeasible_at_full_power = false;
};

inline OutageSolveResult solve_minmax_outage(const SystemConfig& cfg) {
  validate_config(cfg);

  auto total = [](const OutageAllocation& a) {
    double s = 0.0;
    for (double b : a.beta) s += b;
    return s;
  };

  double t_lb = 0.0;  // exclusive; never evaluated
  double t_ub = 1.0 - 1e-12;

  OutageSolveResult res;
  OutageAllocation best = detail::allocate_for_outage_impl(t_ub, cfg, nullptr);
  if (total(best) > 1.0) {
    res.objective = t_ub;
    res.beta = std::move(best.beta);
    res.zeta = std::move(best.zeta);
    res.iterations = 0;
    res.converged = true;
    res.bracket_width = 0.0;
    res.infeasible_at_full_power = true;
    return res;
  }

  const double width_tol = std::min(cfg.bisect_tol, cfg.root_tol);
  int iters = 0;
  std::vector<double> warm = best.zeta;
  while (t_ub - t_lb >= width_tol && iters < cfg.max_iters) {
    ++iters;
    const double t = 0.5 * (t_ub + t_lb);
    OutageAllocation cand = detail::allocate_for_outage_impl(t, cfg, &warm);
    warm = cand.zeta;
    if (total(cand) <= 1.0) {
      t_ub = t;
      best = std::move(cand);
    } else {
      t_lb = t;
    }
  }

  res.objective = t_ub;  // smallest target proven feasible
  res.beta = std::move(best.beta);
  res.zeta = std::move(best.zeta);
  res.iterations = iters;
  res.bracket_width = t_ub - t_lb;
  res.converged = res.bracket_width <= cfg.bisect_tol;
  return res;
}

}  // namespace nomafair
