#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "nomafair/model.hpp"
#include "nomafair/rng.hpp"

namespace nomafair {

// The i-th smallest of n i.i.d. exponential(lambda) gains has CDF
//
//   F_i(x) = Delta_i * Integral_0^x lambda (1 - e^{-lambda s})^{i-1}
//            e^{-lambda (n-i+1) s} ds
//          = sum_{k=0}^{i-1} gamma_{i,k} (1 - e^{-delta_{i,k} x}),
//
// with Delta_i = n! / ((i-1)!(n-i)!), delta_{i,k} = lambda (n-i+1+k) and
// gamma_{i,k} = Delta_i C(i-1,k) (-1)^k / (n-i+1+k); the lambda from the
// density cancels against the one in delta_{i,k}, so gamma is lambda-free.
//
// The alternating sum cancels catastrophically as i grows (|gamma| peaks near
// 3e8 for n = 20), so coefficients and accumulation use extended precision.
// The equivalent regularized-incomplete-beta form I_u(i, n-i+1) with
// u = 1 - e^{-lambda x} is well conditioned at any size and is the default
// evaluation path for large n.

struct OrderStatCoeffs {
  int user_index = 1;  // i, 1-based
  int n_users = 1;     // n
  double lambda = 1.0;
  double big_delta = 1.0;          // n! / ((i-1)!(n-i)!)
  std::vector<double> delta;       // lambda * (n-i+1+k), k = 0..i-1
  std::vector<long double> gamma;  // alternating, gamma[0] > 0, sums to 1

  static OrderStatCoeffs make(int i, int n, double lambda) {
    if (i < 1 || i > n) throw DomainError("order-statistic index out of range");
    if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
    OrderStatCoeffs c;
    c.user_index = i;
    c.n_users = n;
    c.lambda = lambda;

    long double big = static_cast<long double>(i);  // n! / ((i-1)!(n-i)!) = i * C(n, i)
    for (int k = 1; k <= i; ++k) big = big * static_cast<long double>(n - i + k) / k;
    c.big_delta = static_cast<double>(big);

    c.delta.resize(i);
    c.gamma.resize(i);
    long double binom = 1.0L;  // C(i-1, k)
    for (int k = 0; k < i; ++k) {
      if (k > 0) binom = binom * static_cast<long double>(i - k) / k;
      c.delta[k] = lambda * static_cast<double>(n - i + 1 + k);
      const long double sign = (k % 2 == 0) ? 1.0L : -1.0L;
      c.gamma[k] = sign * big * binom / static_cast<long double>(n - i + 1 + k);
    }
    return c;
  }
};

inline double ordered_cdf_sum(double x, const OrderStatCoeffs& c) {
  if (!(x > 0.0)) return 0.0;
  long double acc = 0.0L;
  // the exponent is rebuilt from lambda and the integer offset in extended
  // precision; the double-rounded delta would cost ~|gamma| * eps here
  const long double lambda = c.lambda;
  for (std::size_t k = 0; k < c.gamma.size(); ++k) {
    const long double offset = static_cast<long double>(c.n_users - c.user_index + 1 +
                                                        static_cast<int>(k));
    // 1 - exp(-delta x), computed without cancellation near zero
    acc += c.gamma[k] * (-std::expm1l(-lambda * offset * x));
  }
  return std::clamp(static_cast<double>(acc), 0.0, 1.0);
}

inline double ordered_cdf_sum(double x, int i, int n, double lambda) {
  return ordered_cdf_sum(x, OrderStatCoeffs::make(i, n, lambda));
}

inline double ordered_cdf_beta(double x, int i, int n, double lambda) {
  if (i < 1 || i > n) throw DomainError("order-statistic index out of range");
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  if (!(x > 0.0)) return 0.0;
  const double u = -std::expm1(-lambda * x);
  if (u >= 1.0) return 1.0;
  return boost::math::ibeta(static_cast<double>(i), static_cast<double>(n - i + 1), u);
}

// Sum form keeps full accuracy up to this many users; beyond it the beta form
// takes over.
inline constexpr int kSumFormMaxUsers = 12;

inline double ordered_cdf(double x, int i, int n, double lambda) {
  return n <= kSumFormMaxUsers ? ordered_cdf_sum(x, i, n, lambda)
                               : ordered_cdf_beta(x, i, n, lambda);
}

/// Density of the i-th order statistic; used for Newton refinement.
inline double ordered_pdf(double x, int i, int n, double lambda) {
  if (i < 1 || i > n) throw DomainError("order-statistic index out of range");
  if (!(x > 0.0)) return (i == 1 && x == 0.0) ? lambda * n : 0.0;
  const double u = -std::expm1(-lambda * x);
  double big = static_cast<double>(i);
  for (int k = 1; k <= i; ++k) big = big * static_cast<double>(n - i + k) / k;
  return big * lambda * std::pow(u, i - 1) * std::exp(-lambda * (n - i + 1) * x);
}

/// Unique x >= 0 with ordered_cdf(x) = t, by doubling bracket plus
/// Newton-accelerated bisection. t = 0 maps to 0. A positive `guess` seeds
/// the iteration (e.g. the root for a nearby t).
inline double ordered_cdf_inverse(double t, int i, int n, double lambda,
                                  double root_tol = 1e-12, double guess = 0.0) {
  if (!(t >= 0.0) || t >= 1.0) throw DomainError("probability must lie in [0, 1)");
  if (t == 0.0) return 0.0;

  auto cdf = [&](double x) { return ordered_cdf(x, i, n, lambda); };

  double hi = 1.0 / lambda;
  for (int guard = 0; cdf(hi) < t && guard < 200; ++guard) hi *= 2.0;
  double lo = 0.0;
  double x = (guess > 0.0 && guess < hi) ? guess : 0.5 * hi;

  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (int iter = 0; iter < 200; ++iter) {
    const double f = cdf(x) - t;
    if (f == 0.0) return x;
    if (f > 0.0)
      hi = x;
    else
      lo = x;

    double nx = 0.5 * (lo + hi);
    const double d = ordered_pdf(x, i, n, lambda);
    if (d > 0.0 && std::isfinite(d)) {
      const double newton = x - f / d;
      if (newton > lo && newton < hi) nx = newton;
    }
    // done when the residual meets root_tol and the step is at noise level
    if (std::abs(f) <= root_tol && std::abs(nx - x) <= 4.0 * eps * std::max(1.0, x)) return x;
    if (hi - lo <= 4.0 * eps * std::max(1.0, hi)) return 0.5 * (lo + hi);
    x = nx;
  }
  return x;
}

/// n independent exponential(mean sigma_h2) draws, sorted ascending.
inline std::vector<double> sample_sorted_gains(int n, double sigma_h2, CounterRng& rng) {
  std::vector<double> g(static_cast<std::size_t>(n));
  for (auto& v : g) v = rng.next_exponential(sigma_h2);
  std::sort(g.begin(), g.end());
  return g;
}

/// One sorted fading realization; fully determined by (cfg, seed).
inline ChannelRealization sample_gains(const SystemConfig& cfg, std::uint64_t seed) {
  validate_config(cfg);
  CounterRng rng(seed, 0);
  return ChannelRealization(sample_sorted_gains(cfg.n_users, cfg.channel_variance, rng));
}

}  // namespace nomafair
