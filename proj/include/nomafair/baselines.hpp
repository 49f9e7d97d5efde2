#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "nomafair/model.hpp"
#include "nomafair/noma_core.hpp"
#include "nomafair/ordered_channel.hpp"

namespace nomafair {

/// Orthogonal-access split: user i transmits alone for a fraction
/// time_fractions[i] of the block using power_fractions[i] of the total
/// energy, i.e. instantaneous slot power q_i P / alpha_i.
class TdmaAllocation {
 public:
  TdmaAllocation() = default;
  TdmaAllocation(std::vector<double> time_fractions, std::vector<double> power_fractions)
      : alpha_(std::move(time_fractions)), q_(std::move(power_fractions)) {
    if (alpha_.size() != q_.size())
      throw InvalidConfig("time_fractions", "time and power vectors must match");
    double sa = 0.0, sq = 0.0;
    for (double a : alpha_) {
      if (!(a >= 0.0)) throw InvalidConfig("time_fractions", "negative time share");
      sa += a;
    }
    for (double v : q_) {
      if (!(v >= 0.0)) throw InvalidConfig("power_fractions", "negative energy share");
      sq += v;
    }
    if (std::abs(sa - 1.0) > 1e-9)
      throw InvalidConfig("time_fractions", "time shares must sum to one");
    if (sq > 1.0 + 1e-9) throw InvalidConfig("power_fractions", "energy shares exceed budget");
  }

  const std::vector<double>& time_fractions() const noexcept { return alpha_; }
  const std::vector<double>& power_fractions() const noexcept { return q_; }

 private:
  std::vector<double> alpha_;
  std::vector<double> q_;
};

struct TdmaResult {
  double objective = 0.0;  // max-min rate, BPCU
  TdmaAllocation allocation;
  int iterations = 0;
  bool converged = false;
  double bracket_width = 0.0;
};

enum class TdmaPowerModel {
  kJointTimeEnergy,  // optimize both time shares and per-slot energy
  kFixedSlotPower,   // every slot runs at full power P; only time is split
};

namespace detail {

inline constexpr double kLn2 = std::numbers::ln2;

// d/dalpha [alpha (2^{t/alpha} - 1)] = h(t/alpha) with
// h(u) = 2^u (1 - u ln2) - 1, strictly decreasing from 0 to -inf on u > 0.
inline double tdma_stationarity(double u) {
  const double e = std::exp2(u);
  return e * (1.0 - u * kLn2) - 1.0;
}

// Unique u > 0 with h(u) = y, y < 0. h'(u) = -u (ln2)^2 2^u. A positive
// `guess` seeds the Newton iteration.
inline double tdma_stationarity_inverse(double y, double guess = 0.0) {
  double hi = std::max(1.0, std::sqrt(-2.0 * y) / kLn2);
  if (guess > hi) hi = guess;
  for (int guard = 0; tdma_stationarity(hi) > y && guard < 200; ++guard) hi *= 2.0;
  double lo = 0.0;
  double u = (guess > 0.0 && guess < hi) ? guess : 0.5 * hi;
  for (int iter = 0; iter < 200; ++iter) {
    const double f = tdma_stationarity(u) - y;
    if (f == 0.0) return u;
    if (f < 0.0)
      hi = u;
    else
      lo = u;
    double nu = 0.5 * (lo + hi);
    const double d = -u * kLn2 * kLn2 * std::exp2(u);
    if (std::isfinite(d) && d < 0.0) {
      const double newton = u - f / d;
      if (newton > lo && newton < hi) nu = newton;
    }
    if (std::abs(f) <= 1e-14 * std::max(1.0, -y) && std::abs(nu - u) <= 1e-13 * std::max(1.0, u))
      return u;
    if (hi - lo <= 1e-13 * std::max(1.0, hi)) return 0.5 * (lo + hi);
    u = nu;
  }
  return u;
}

struct TdmaInner {
  std::vector<double> alpha;
  std::vector<double> q;
  double energy = 0.0;
};

// Minimum total energy delivering rate t to every user, over time shares on
// the simplex. Separable and convex; solved by bisecting the simplex
// multiplier nu, where each user's share follows from h(t/alpha_i) =
// -nu / w_i with w_i = sigma_n^2 / (P g_i). `nu_hint` carries the multiplier
// between calls on the same channel.
inline TdmaInner tdma_min_energy(double t, const ChannelRealization& chan,
                                 const SystemConfig& cfg, double* nu_hint = nullptr) {
  const int n = chan.size();
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    w[static_cast<std::size_t>(i)] =
        cfg.noise_variance / (cfg.total_power * chan[static_cast<std::size_t>(i)]);

  std::vector<double> u_warm(static_cast<std::size_t>(n), 0.0);
  auto time_total = [&](double nu, std::vector<double>* u_out) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double u = tdma_stationarity_inverse(-nu / w[static_cast<std::size_t>(i)],
                                                 u_warm[static_cast<std::size_t>(i)]);
      u_warm[static_cast<std::size_t>(i)] = u;
      if (u_out) (*u_out)[static_cast<std::size_t>(i)] = u;
      s += t / u;
    }
    return s;
  };

  // bracket the multiplier: time use decreases in nu
  double nu_lo = (nu_hint && *nu_hint > 0.0) ? *nu_hint : 1.0, nu_hi = nu_lo;
  if (time_total(nu_lo, nullptr) > 1.0) {
    while (time_total(nu_hi, nullptr) > 1.0) nu_hi *= 2.0;
  } else {
    while (time_total(nu_lo, nullptr) <= 1.0) nu_lo *= 0.5;
  }
  while (nu_hi - nu_lo > 1e-9 * nu_hi) {
    const double nu = 0.5 * (nu_lo + nu_hi);
    if (time_total(nu, nullptr) > 1.0)
      nu_lo = nu;
    else
      nu_hi = nu;
  }
  if (nu_hint) *nu_hint = nu_hi;

  TdmaInner r;
  r.alpha.resize(static_cast<std::size_t>(n));
  r.q.resize(static_cast<std::size_t>(n));
  std::vector<double> u(static_cast<std::size_t>(n));
  time_total(nu_hi, &u);
  for (int i = 0; i < n; ++i) {
    const double ai = t / u[static_cast<std::size_t>(i)];
    r.alpha[static_cast<std::size_t>(i)] = ai;
    r.q[static_cast<std::size_t>(i)] =
        w[static_cast<std::size_t>(i)] * ai * (std::exp2(u[static_cast<std::size_t>(i)]) - 1.0);
    r.energy += r.q[static_cast<std::size_t>(i)];
  }
  // the multiplier solve leaves the shares a hair off the simplex; renormalize
  double sa = 0.0;
  for (double a : r.alpha) sa += a;
  for (double& a : r.alpha) a /= sa;
  return r;
}

}  // namespace detail

/// Best max-min rate achievable by orthogonal time sharing on one
/// realization. The joint model optimizes time and energy shares together;
/// the fixed-slot-power variant keeps every slot at full power and has a
/// closed form.
inline TdmaResult tdma_maxmin(const ChannelRealization& chan, const SystemConfig& cfg,
                              TdmaPowerModel model = TdmaPowerModel::kJointTimeEnergy) {
  validate_config(cfg);
  if (chan.size() != cfg.n_users)
    throw InvalidConfig("gains", "realization size must match n_users");
  const int n = chan.size();

  if (model == TdmaPowerModel::kFixedSlotPower) {
    double inv_sum = 0.0;
    for (int i = 0; i < n; ++i)
      inv_sum += 1.0 / std::log2(1.0 + cfg.total_power * chan[static_cast<std::size_t>(i)] /
                                           cfg.noise_variance);
    const double t = 1.0 / inv_sum;
    std::vector<double> alpha(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      alpha[static_cast<std::size_t>(i)] =
          t / std::log2(1.0 + cfg.total_power * chan[static_cast<std::size_t>(i)] /
                                  cfg.noise_variance);
    double sa = 0.0;
    for (double a : alpha) sa += a;
    for (double& a : alpha) a /= sa;
    TdmaResult res;
    res.objective = t;
    res.allocation = TdmaAllocation(alpha, alpha);  // full slot power: q_i = alpha_i
    res.converged = true;
    return res;
  }

  double t_lb = 0.0;
  double t_ub = std::log2(1.0 + cfg.total_power * chan[static_cast<std::size_t>(n - 1)] /
                                    cfg.noise_variance);
  detail::TdmaInner best;
  best.alpha.assign(static_cast<std::size_t>(n), 1.0 / n);
  best.q.assign(static_cast<std::size_t>(n), 0.0);

  int iters = 0;
  double nu_hint = 0.0;
  while (t_ub - t_lb >= cfg.bisect_tol && iters < cfg.max_iters) {
    ++iters;
    const double t = 0.5 * (t_ub + t_lb);
    detail::TdmaInner inner = detail::tdma_min_energy(t, chan, cfg, &nu_hint);
    if (inner.energy <= 1.0) {
      t_lb = t;
      best = std::move(inner);
    } else {
      t_ub = t;
    }
  }

  TdmaResult res;
  res.objective = t_lb;
  res.allocation = TdmaAllocation(std::move(best.alpha), std::move(best.q));
  res.iterations = iters;
  res.bracket_width = t_ub - t_lb;
  res.converged = res.bracket_width <= cfg.bisect_tol;
  return res;
}

/// Min-max outage of orthogonal access with equal time shares at full slot
/// power: each user gets 1/N of the block, so its slot must carry N r0 BPCU.
/// The worst user is the weakest by stochastic ordering.
inline double tdma_outage(const SystemConfig& cfg) {
  validate_config(cfg);
  const int n = cfg.n_users;
  const double x =
      cfg.noise_variance * (std::exp2(static_cast<double>(n) * cfg.target_rate) - 1.0) /
      cfg.total_power;
  double worst = 0.0;
  for (int i = 1; i <= n; ++i) worst = std::max(worst, ordered_cdf(x, i, n, cfg.lambda()));
  return worst;
}

struct FixedNomaOutage {
  std::vector<double> beta;
  std::vector<double> per_user_outage;
  double max_outage = 0.0;
};

/// Static triangular power split beta_m = (N - m + 1) / mu with
/// mu = N (N + 1) / 2: the weakest user gets the largest share. Users whose
/// share cannot reach the rate target sit at outage one.
inline FixedNomaOutage fixed_noma_outage(const SystemConfig& cfg) {
  validate_config(cfg);
  const int n = cfg.n_users;
  const double mu = 0.5 * static_cast<double>(n) * static_cast<double>(n + 1);

  FixedNomaOutage out;
  out.beta.resize(static_cast<std::size_t>(n));
  for (int m = 1; m <= n; ++m)
    out.beta[static_cast<std::size_t>(m - 1)] = static_cast<double>(n - m + 1) / mu;

  const DecodingThresholds th =
      decoding_thresholds(PowerAllocation(out.beta, 1e-9), cfg);
  out.per_user_outage.resize(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    const double zh = th.zeta_hat[static_cast<std::size_t>(i - 1)];
    out.per_user_outage[static_cast<std::size_t>(i - 1)] =
        std::isinf(zh) ? 1.0 : ordered_cdf(zh, i, n, cfg.lambda());
    out.max_outage = std::max(out.max_outage, out.per_user_outage[static_cast<std::size_t>(i - 1)]);
  }
  return out;
}

}  // namespace nomafair
