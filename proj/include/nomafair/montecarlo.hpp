#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

#include "nomafair/model.hpp"
#include "nomafair/noma_core.hpp"
#include "nomafair/ordered_channel.hpp"
#include "nomafair/rng.hpp"

namespace nomafair {

// First-principles simulation: outage and min-rate statistics are estimated
// from the rate expressions directly, never through the threshold algebra or
// the order-statistic closed forms, so the estimates can arbitrate them.
//
// The sample index space is cut into fixed blocks; block k always draws from
// stream k of the seed no matter which thread runs it, so results are
// identical for any worker count.

namespace detail {
inline constexpr std::int64_t kMcBlockSize = 1 << 14;
inline constexpr std::uint64_t kOutageStreamBase = 1ull << 32;
inline constexpr std::uint64_t kMinRateStreamBase = 2ull << 32;

template <typename BlockFn>
inline void run_blocks(std::int64_t n_blocks, int n_threads, BlockFn&& fn) {
  if (n_threads <= 1 || n_blocks <= 1) {
    for (std::int64_t b = 0; b < n_blocks; ++b) fn(b);
    return;
  }
  std::atomic<std::int64_t> next{0};
  auto worker = [&] {
    for (std::int64_t b = next.fetch_add(1); b < n_blocks; b = next.fetch_add(1)) fn(b);
  };
  std::vector<std::thread> pool;
  const int k = std::min<int>(n_threads, static_cast<int>(n_blocks));
  pool.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}
}  // namespace detail

struct OutageStats {
  std::vector<double> per_user_outage;
  std::vector<double> half_width;  // 3-sigma binomial confidence half-widths
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
};

/// Frequency estimate of each user's outage under the given power split:
/// a user is in outage when any of the flows it must decode falls below the
/// target rate for the drawn fading realization.
inline OutageStats estimate_outage(const PowerAllocation& alloc, const SystemConfig& cfg,
                                   std::int64_t samples, std::uint64_t seed,
                                   int n_threads = 1) {
  validate_config(cfg);
  if (alloc.size() != cfg.n_users)
    throw InvalidConfig("beta", "allocation size must match n_users");
  if (samples < 1) throw DomainError("sample count must be positive");

  const int n = cfg.n_users;
  const double p = cfg.total_power;
  const double sn2 = cfg.noise_variance;
  const double r0 = cfg.target_rate;

  // interference ahead of each flow, fixed across samples
  std::vector<double> suffix(static_cast<std::size_t>(n));
  double s = 0.0;
  for (int m = n - 1; m >= 0; --m) {
    suffix[static_cast<std::size_t>(m)] = s;
    s += alloc[static_cast<std::size_t>(m)];
  }

  const std::int64_t n_blocks =
      (samples + detail::kMcBlockSize - 1) / detail::kMcBlockSize;
  std::vector<std::vector<std::uint64_t>> counts(
      static_cast<std::size_t>(n_blocks),
      std::vector<std::uint64_t>(static_cast<std::size_t>(n), 0));

  detail::run_blocks(n_blocks, n_threads, [&](std::int64_t b) {
    CounterRng rng(seed, detail::kOutageStreamBase + static_cast<std::uint64_t>(b));
    const std::int64_t lo = b * detail::kMcBlockSize;
    const std::int64_t hi = std::min(samples, lo + detail::kMcBlockSize);
    std::vector<double> g(static_cast<std::size_t>(n));
    auto& c = counts[static_cast<std::size_t>(b)];
    for (std::int64_t it = lo; it < hi; ++it) {
      for (auto& v : g) v = rng.next_exponential(cfg.channel_variance);
      std::sort(g.begin(), g.end());
      for (int i = 0; i < n; ++i) {
        const double pg = p * g[static_cast<std::size_t>(i)];
        for (int m = 0; m <= i; ++m) {
          const double sinr = alloc[static_cast<std::size_t>(m)] * pg /
                              (pg * suffix[static_cast<std::size_t>(m)] + sn2);
          if (std::log2(1.0 + sinr) < r0) {
            ++c[static_cast<std::size_t>(i)];
            break;
          }
        }
      }
    }
  });

  OutageStats st;
  st.samples = samples;
  st.seed = seed;
  st.per_user_outage.resize(static_cast<std::size_t>(n));
  st.half_width.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::uint64_t total = 0;
    for (const auto& c : counts) total += c[static_cast<std::size_t>(i)];
    const double ph = static_cast<double>(total) / static_cast<double>(samples);
    st.per_user_outage[static_cast<std::size_t>(i)] = ph;
    st.half_width[static_cast<std::size_t>(i)] =
        3.0 * std::sqrt(ph * (1.0 - ph) / static_cast<double>(samples));
  }
  return st;
}

struct MinRateSummary {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double p10 = 0.0, p25 = 0.0, p50 = 0.0, p75 = 0.0, p90 = 0.0;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
};

/// Distribution summary of the worst own-flow rate when `policy` picks the
/// power split for each drawn realization. The policy must be safe to call
/// from several threads at once.
inline MinRateSummary estimate_min_rate_cdf(
    const std::function<PowerAllocation(const ChannelRealization&)>& policy,
    const SystemConfig& cfg, std::int64_t samples, std::uint64_t seed, int n_threads = 1) {
  validate_config(cfg);
  if (samples < 1) throw DomainError("sample count must be positive");

  std::vector<double> values(static_cast<std::size_t>(samples));
  const std::int64_t n_blocks =
      (samples + detail::kMcBlockSize - 1) / detail::kMcBlockSize;

  detail::run_blocks(n_blocks, n_threads, [&](std::int64_t b) {
    CounterRng rng(seed, detail::kMinRateStreamBase + static_cast<std::uint64_t>(b));
    const std::int64_t lo = b * detail::kMcBlockSize;
    const std::int64_t hi = std::min(samples, lo + detail::kMcBlockSize);
    for (std::int64_t it = lo; it < hi; ++it) {
      ChannelRealization chan(
          sample_sorted_gains(cfg.n_users, cfg.channel_variance, rng));
      const PowerAllocation alloc = policy(chan);
      values[static_cast<std::size_t>(it)] = min_own_rate(alloc, chan, cfg);
    }
  });

  MinRateSummary out;
  out.samples = samples;
  out.seed = seed;
  long double acc = 0.0L;
  for (double v : values) acc += v;  // fixed order, independent of threads
  out.mean = static_cast<double>(acc / static_cast<long double>(samples));

  std::sort(values.begin(), values.end());
  auto quant = [&](double q) {
    const auto idx = static_cast<std::size_t>(
        std::llround(q * static_cast<double>(samples - 1)));
    return values[std::min(idx, values.size() - 1)];
  };
  out.min = values.front();
  out.max = values.back();
  out.p10 = quant(0.10);
  out.p25 = quant(0.25);
  out.p50 = quant(0.50);
  out.p75 = quant(0.75);
  out.p90 = quant(0.90);
  return out;
}

}  // namespace nomafair
