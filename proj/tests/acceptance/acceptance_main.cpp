// Acceptance checklist. Each criterion prints exactly one PASS/FAIL line;
// the exit code is the number of failures.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "nomafair/nomafair.hpp"

using namespace nomafair;

namespace {

int g_failures = 0;
std::string g_cli_path;

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void report(int index, const std::string& name, bool pass, double elapsed_ms,
            const std::string& detail = "") {
  std::printf("%s criterion %d: %s (%.0f ms)%s%s\n", pass ? "PASS" : "FAIL", index, name.c_str(),
              elapsed_ms, detail.empty() ? "" : " -- ", detail.c_str());
  if (!pass) ++g_failures;
}

SystemConfig make_cfg(int n, double p, double r0 = 1.0) {
  SystemConfig cfg;
  cfg.n_users = n;
  cfg.total_power = p;
  cfg.target_rate = r0;
  return cfg;
}

std::string run_cli(const std::string& args, int* exit_code) {
  const std::string cmd = g_cli_path + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    *exit_code = -1;
    return "";
  }
  std::string out;
  char buf[4096];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, got);
  const int status = pclose(pipe);
  *exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}

// ---------------------------------------------------------------------------

void criterion_1_analytic_fixtures() {
  const auto start = Clock::now();
  bool pass = true;
  std::ostringstream detail;

  // warm-up so the timed solves measure arithmetic, not first-touch costs
  (void)solve_maxmin(ChannelRealization({0.5}), make_cfg(1, 10.0));
  (void)solve_minmax_outage(make_cfg(1, 10.0));

  {
    const auto t0 = Clock::now();
    const auto r = solve_maxmin(ChannelRealization({0.5}), make_cfg(1, 10.0));
    const double ms = ms_since(t0);
    const double cap = std::log2(6.0);
    if (std::abs(r.objective - cap) > 1e-12 || std::abs(r.allocation[0] - 1.0) > 1e-12 ||
        ms >= 1.0) {
      pass = false;
      detail << "N=1 max-min: t*=" << r.objective << " beta=" << r.allocation[0] << " in " << ms
             << " ms; ";
    }
  }
  {
    const auto t0 = Clock::now();
    const auto r = solve_minmax_outage(make_cfg(1, 10.0));
    const double ms = ms_since(t0);
    if (std::abs(r.objective - 0.09516258196404043) > 1e-9 || ms >= 1.0) {
      pass = false;
      detail << "N=1 min-max outage: t*=" << r.objective << " in " << ms << " ms; ";
    }
  }
  {
    const auto t0 = Clock::now();
    const auto r = solve_maxmin(ChannelRealization({0.5, 2.0}), make_cfg(2, 10.0));
    const double ms = ms_since(t0);
    if (std::abs(r.objective - 1.857367) > 1e-5 || std::abs(r.allocation[0] - 0.868826) > 1e-5 ||
        std::abs(r.allocation[1] - 0.131174) > 1e-5 || ms >= 1.0) {
      pass = false;
      detail << "N=2 max-min: t*=" << r.objective << " beta=[" << r.allocation[0] << ","
             << r.allocation[1] << "] in " << ms << " ms; ";
    }
  }
  report(1, "analytic fixtures, each under 1 ms", pass, ms_since(start), detail.str());
}

void criterion_2_equal_value_certificates() {
  CounterRng rng(1001, 0);
  const int kPerN = 25;
  bool pass = true;
  std::ostringstream detail;
  double worst_rate_spread = 0.0, worst_outage_spread = 0.0;

  // draw the instances first; the budget covers the solves
  struct Instance {
    SystemConfig cfg;
    ChannelRealization chan;
  };
  std::vector<Instance> instances;
  for (int n : {2, 5, 10, 20}) {
    for (int k = 0; k < kPerN; ++k) {
      SystemConfig cfg = make_cfg(n, std::pow(10.0, 3.0 * rng.next_unit()),
                                  0.05 + 0.95 * rng.next_unit());
      cfg.channel_variance = 0.5 + 1.5 * rng.next_unit();
      ChannelRealization chan(sample_sorted_gains(n, cfg.channel_variance, rng));
      instances.push_back({cfg, std::move(chan)});
    }
  }

  const auto start = Clock::now();
  for (const auto& inst : instances) {
    const auto mm = solve_maxmin(inst.chan, inst.cfg);
    double lo = 1e300, hi = -1e300;
    for (int i = 1; i <= inst.cfg.n_users; ++i) {
      const double r = achievable_rate(mm.allocation, inst.chan, inst.cfg, i, i);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    worst_rate_spread = std::max(worst_rate_spread, hi - lo);

    const auto oo = solve_minmax_outage(inst.cfg);
    if (oo.infeasible_at_full_power) continue;
    const auto th = decoding_thresholds(PowerAllocation(oo.beta, 1e-9), inst.cfg);
    double olo = 2.0, ohi = -1.0;
    for (int i = 1; i <= inst.cfg.n_users; ++i) {
      const double o = ordered_cdf(th.zeta_hat[static_cast<std::size_t>(i - 1)], i,
                                   inst.cfg.n_users, inst.cfg.lambda());
      olo = std::min(olo, o);
      ohi = std::max(ohi, o);
    }
    worst_outage_spread = std::max(worst_outage_spread, ohi - olo);
  }
  const double elapsed = ms_since(start);

  if (worst_rate_spread > 1e-6) {
    pass = false;
    detail << "rate spread " << worst_rate_spread << "; ";
  }
  if (worst_outage_spread > 1e-8) {
    pass = false;
    detail << "outage spread " << worst_outage_spread << "; ";
  }
  if (elapsed >= 100.0) {
    pass = false;
    detail << "took " << elapsed << " ms; ";
  }
  if (detail.str().empty()) {
    std::ostringstream ok;
    ok << "worst spreads: rate " << worst_rate_spread << ", outage " << worst_outage_spread;
    detail.str(ok.str());
  }
  report(2, "equal-value certificates on 100 random instances in under 100 ms", pass, elapsed,
         detail.str());
}

void criterion_3_optimality_oracles() {
  const auto start = Clock::now();
  bool pass = true;
  std::ostringstream detail;

  CounterRng rng(1003, 0);
  for (int n = 1; n <= 3; ++n) {
    SystemConfig cfg = make_cfg(n, 10.0, 0.5);
    ChannelRealization chan(sample_sorted_gains(n, 1.0, rng));
    const double t_star = solve_maxmin(chan, cfg).objective;
    double best = 0.0;
    for (int s = 0; s < 100000; ++s) {
      std::vector<double> beta(static_cast<std::size_t>(n));
      double sum = 0.0;
      for (auto& b : beta) {
        b = -std::log(rng.next_unit());
        sum += b;
      }
      for (auto& b : beta) b /= sum;
      best = std::max(best, min_own_rate(PowerAllocation(beta), chan, cfg));
    }
    if (best > t_star + 1e-4) {
      pass = false;
      detail << "N=" << n << " simplex point beats max-min by " << best - t_star << "; ";
    }
  }

  {
    const SystemConfig cfg = make_cfg(2, 10.0);
    const double t_star = solve_minmax_outage(cfg).objective;
    double best = 1.0;
    for (int s = 0; s < 100000; ++s) {
      std::vector<double> beta(2);
      double sum = 0.0;
      for (auto& b : beta) {
        b = -std::log(rng.next_unit());
        sum += b;
      }
      for (auto& b : beta) b /= sum;
      const auto th = decoding_thresholds(PowerAllocation(beta), cfg);
      double worst = 0.0;
      for (int i = 1; i <= 2; ++i) {
        const double zh = th.zeta_hat[static_cast<std::size_t>(i - 1)];
        worst = std::max(worst, std::isinf(zh) ? 1.0 : ordered_cdf(zh, i, 2, cfg.lambda()));
      }
      best = std::min(best, worst);
    }
    if (best < t_star - 1e-4) {
      pass = false;
      detail << "N=2 split beats min-max outage by " << t_star - best << "; ";
    }
  }

  const double elapsed = ms_since(start);
  if (elapsed >= 10000.0) pass = false;
  report(3, "optimality oracles, 1e5 random allocations", pass, elapsed, detail.str());
}

void criterion_4_closed_form_vs_monte_carlo() {
  const auto start = Clock::now();
  bool pass = true;
  std::ostringstream detail;
  for (double p : {10.0, 100.0}) {
    for (double r0 : {0.05, 0.5}) {
      const SystemConfig cfg = make_cfg(5, p, r0);
      const auto fx = fixed_noma_outage(cfg);
      const auto opt = solve_minmax_outage(cfg);

      struct Case {
        const char* name;
        std::vector<double> beta;
        std::vector<double> closed;
      };
      std::vector<Case> cases;
      cases.push_back({"fixed", fx.beta, fx.per_user_outage});
      {
        const auto th = decoding_thresholds(PowerAllocation(opt.beta, 1e-9), cfg);
        std::vector<double> closed(5);
        for (int i = 1; i <= 5; ++i)
          closed[static_cast<std::size_t>(i - 1)] =
              ordered_cdf(th.zeta_hat[static_cast<std::size_t>(i - 1)], i, 5, cfg.lambda());
        cases.push_back({"optimal", opt.beta, std::move(closed)});
      }
      for (const auto& c : cases) {
        const auto mc = estimate_outage(PowerAllocation(c.beta, 1e-9), cfg, 1000000, 2024);
        for (int i = 0; i < 5; ++i) {
          const double closed = c.closed[static_cast<std::size_t>(i)];
          const double delta =
              std::abs(mc.per_user_outage[static_cast<std::size_t>(i)] - closed);
          // binomial deviation under the closed-form hypothesis; the
          // estimate-based width degenerates when no outage event lands
          const double three_sigma = 3.0 * std::sqrt(closed * (1.0 - closed) / 1e6);
          if (delta > three_sigma) {
            pass = false;
            detail << c.name << " P=" << p << " r0=" << r0 << " user " << i + 1 << ": |delta| "
                   << delta << " > 3sigma " << three_sigma << "; ";
          }
        }
      }
    }
  }
  const double elapsed = ms_since(start);
  if (elapsed >= 60000.0) pass = false;
  report(4, "closed forms vs 1e6-sample Monte Carlo within 3 sigma", pass, elapsed, detail.str());
}

void criterion_5_order_statistic_cdf() {
  const auto start = Clock::now();
  bool pass = true;
  std::ostringstream detail;

  double worst = 0.0;
  for (int n = 1; n <= 20; ++n)
    for (int i = 1; i <= n; ++i) {
      const auto c = OrderStatCoeffs::make(i, n, 1.0);
      for (int j = 1; j <= 100; ++j) {
        const double x = 0.06 * j;
        worst =
            std::max(worst, std::abs(ordered_cdf_sum(x, c) - ordered_cdf_beta(x, i, n, 1.0)));
      }
    }
  if (worst > 1e-9) {
    pass = false;
    detail << "sum-beta gap " << worst << "; ";
  } else {
    detail << "sum-beta gap " << worst << "; ";
  }

  const int n = 5, kSamples = 1000000;
  const std::vector<double> xs = {0.2, 0.5, 1.0, 2.0};
  std::vector<std::vector<int>> hits(xs.size(), std::vector<int>(n, 0));
  CounterRng rng(1005, 0);
  for (int s = 0; s < kSamples; ++s) {
    const auto g = sample_sorted_gains(n, 1.0, rng);
    for (std::size_t xi = 0; xi < xs.size(); ++xi)
      for (int i = 0; i < n; ++i)
        if (g[static_cast<std::size_t>(i)] <= xs[xi]) ++hits[xi][static_cast<std::size_t>(i)];
  }
  for (std::size_t xi = 0; xi < xs.size(); ++xi)
    for (int i = 1; i <= n; ++i) {
      const double pr = ordered_cdf(xs[xi], i, n, 1.0);
      const double emp =
          static_cast<double>(hits[xi][static_cast<std::size_t>(i - 1)]) / kSamples;
      const double three_sigma = 3.0 * std::sqrt(pr * (1.0 - pr) / kSamples);
      if (std::abs(emp - pr) > three_sigma + 1e-12) {
        pass = false;
        detail << "empirical CDF x=" << xs[xi] << " i=" << i << " off by " << std::abs(emp - pr)
               << " (3sigma " << three_sigma << "); ";
      }
    }

  const double elapsed = ms_since(start);
  if (elapsed >= 30000.0) pass = false;
  report(5, "order-statistic CDF: cross-form 1e-9 and empirical 3-sigma", pass, elapsed,
         detail.str());
}

void criterion_6_outage_directionality() {
  const auto start = Clock::now();
  bool pass = true;
  bool plain_ok = true;
  double worst_fixed_ratio = 0.0, worst_tdma_ratio = 0.0;
  std::string first_fail;

  for (double r0 : {0.05, 0.5}) {
    for (int pdb = 0; pdb <= 30; ++pdb) {
      const SystemConfig cfg = make_cfg(5, db_to_linear(pdb), r0);
      const double noma = solve_minmax_outage(cfg).objective;
      const double fixed = fixed_noma_outage(cfg).max_outage;
      const double tdma = tdma_outage(cfg);

      plain_ok = plain_ok && noma <= fixed && fixed <= 1.0 && noma <= tdma;

      if (fixed >= 1e-3) {
        worst_fixed_ratio = std::max(worst_fixed_ratio, noma / fixed);
        if (noma > fixed / 5.0 && first_fail.empty()) {
          std::ostringstream os;
          os << "first miss at r0=" << r0 << " P=" << pdb << " dB: noma " << noma
             << " vs fixed/5 " << fixed / 5.0;
          first_fail = os.str();
        }
        if (noma > fixed / 5.0) pass = false;
      }
      worst_tdma_ratio = std::max(worst_tdma_ratio, noma / tdma);
      if (noma > tdma / 5.0) pass = false;
    }
  }

  std::ostringstream detail;
  detail << "plain ordering noma<=fixed<=1, noma<=tdma: " << (plain_ok ? "holds" : "VIOLATED")
         << " at every grid point; worst noma/fixed ratio " << worst_fixed_ratio
         << " (required <= 0.2 where fixed >= 1e-3), worst noma/tdma ratio " << worst_tdma_ratio
         << " (required <= 0.2)";
  if (!first_fail.empty()) detail << "; " << first_fail;
  const double elapsed = ms_since(start);
  if (elapsed >= 5000.0) pass = false;
  report(6, "factor-5 outage gaps vs fixed split and TDMA over 0-30 dB", pass, elapsed,
         detail.str());
}

void criterion_7_fairness_trends() {
  const auto start = Clock::now();
  bool pass = true;
  std::ostringstream detail;

  const std::vector<int> ns = {5, 10, 20};
  const std::vector<double> pdbs = {10.0, 20.0, 30.0};
  const int kRealizations = 1000;
  double noma_mean[3][3] = {};
  double tdma_mean[3][3] = {};

  for (std::size_t ni = 0; ni < ns.size(); ++ni) {
    for (std::size_t pi = 0; pi < pdbs.size(); ++pi) {
      SystemConfig cfg = make_cfg(ns[ni], db_to_linear(pdbs[pi]), 0.5);
      long double acc_n = 0.0L, acc_t = 0.0L;
      for (int k = 0; k < kRealizations; ++k) {
        CounterRng rng(1007, (static_cast<std::uint64_t>(ni) << 40) ^
                                 (static_cast<std::uint64_t>(pi) << 20) ^
                                 static_cast<std::uint64_t>(k));
        ChannelRealization chan(sample_sorted_gains(ns[ni], 1.0, rng));
        acc_n += solve_maxmin(chan, cfg).objective;
        acc_t += tdma_maxmin(chan, cfg).objective;
      }
      noma_mean[ni][pi] = static_cast<double>(acc_n / kRealizations);
      tdma_mean[ni][pi] = static_cast<double>(acc_t / kRealizations);
    }
  }

  for (std::size_t ni = 0; ni < ns.size(); ++ni)
    for (std::size_t pi = 0; pi + 1 < pdbs.size(); ++pi)
      if (!(noma_mean[ni][pi] < noma_mean[ni][pi + 1])) {
        pass = false;
        detail << "mean rate not increasing in P at N=" << ns[ni] << "; ";
      }
  for (std::size_t pi = 0; pi < pdbs.size(); ++pi)
    for (std::size_t ni = 0; ni + 1 < ns.size(); ++ni)
      if (!(noma_mean[ni][pi] > noma_mean[ni + 1][pi])) {
        pass = false;
        detail << "mean rate not decreasing in N at P=" << pdbs[pi] << " dB; ";
      }
  for (std::size_t ni = 0; ni < ns.size(); ++ni)
    for (std::size_t pi = 0; pi < pdbs.size(); ++pi)
      if (!(noma_mean[ni][pi] >= tdma_mean[ni][pi])) {
        pass = false;
        detail << "TDMA above superposition at N=" << ns[ni] << " P=" << pdbs[pi] << "; ";
      }
  // both means shrink like 1/N, so the advantage is the ratio: it must grow
  // with the user count at every power
  for (std::size_t pi = 0; pi < pdbs.size(); ++pi)
    for (std::size_t ni = 0; ni + 1 < ns.size(); ++ni) {
      const double adv_small = noma_mean[ni][pi] / tdma_mean[ni][pi];
      const double adv_large = noma_mean[ni + 1][pi] / tdma_mean[ni + 1][pi];
      if (!(adv_large > adv_small)) {
        pass = false;
        detail << "advantage not growing with N at P=" << pdbs[pi] << " dB (" << adv_small
               << " -> " << adv_large << "); ";
      }
    }

  if (detail.str().empty()) {
    std::ostringstream ok;
    ok << "advantage at 20 dB: " << noma_mean[0][1] / tdma_mean[0][1] << " (N=5) -> "
       << noma_mean[2][1] / tdma_mean[2][1] << " (N=20)";
    detail.str(ok.str());
  }
  const double elapsed = ms_since(start);
  if (elapsed >= 120000.0) pass = false;
  report(7, "fairness-rate trends over 1000 realizations per point", pass, elapsed, detail.str());
}

void criterion_8_symmetric_coincidence() {
  const auto start = Clock::now();
  bool pass = true;
  std::ostringstream detail;

  {
    const SystemConfig cfg = make_cfg(2, 10.0);
    const ChannelRealization chan({1.0, 1.0});
    const double noma = solve_maxmin(chan, cfg).objective;
    const double tdma = tdma_maxmin(chan, cfg).objective;
    if (std::abs(noma - tdma) > 1e-5 || std::abs(noma - 1.7297160) > 1e-5) {
      pass = false;
      detail << "N=2: noma " << noma << " tdma " << tdma << "; ";
    }
  }
  {
    const SystemConfig cfg = make_cfg(3, 20.0);
    const ChannelRealization chan({0.7, 0.7, 0.7});
    const double noma = solve_maxmin(chan, cfg).objective;
    const double tdma = tdma_maxmin(chan, cfg).objective;
    const double closed = std::log2(1.0 + 20.0 * 0.7) / 3.0;
    if (std::abs(noma - tdma) > 1e-5 || std::abs(noma - closed) > 1e-5) {
      pass = false;
      detail << "N=3: noma " << noma << " tdma " << tdma << " closed " << closed << "; ";
    }
  }
  report(8, "equal-gain channels make the two schemes coincide", pass, ms_since(start),
         detail.str());
}

void criterion_9_threshold_ordering() {
  const auto start = Clock::now();
  bool pass = true;
  std::ostringstream detail;
  CounterRng rng(1009, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_unit() * 18.999);
    const double t = 1e-6 + (1.0 - 2e-6) * rng.next_unit();
    SystemConfig cfg = make_cfg(n, 10.0, 0.5);
    cfg.channel_variance = 0.5 + 1.5 * rng.next_unit();
    const auto a = allocate_for_outage(t, cfg);
    for (int i = 1; i < n; ++i)
      if (!(a.zeta[static_cast<std::size_t>(i - 1)] <= a.zeta[static_cast<std::size_t>(i)])) {
        pass = false;
        detail << "unordered thresholds at N=" << n << " t=" << t << "; ";
      }
  }
  report(9, "outage thresholds are always ordered weakest-first", pass, ms_since(start),
         detail.str());
}

void criterion_10_cli_determinism() {
  const auto start = Clock::now();
  bool pass = true;
  std::ostringstream detail;
  int code_a = 0, code_b = 0, code_c = 0;

  const std::string sweep =
      "sweep --figure noma-vs-tdma --pmin-db 0 --pmax-db 20 --pstep-db 10 --n-list 2,5 "
      "--realizations 25 --seed 4242";
  const std::string a = run_cli(sweep + " --threads 1", &code_a);
  const std::string b = run_cli(sweep + " --threads 1", &code_b);
  const std::string c = run_cli(sweep + " --threads 4", &code_c);
  if (code_a != 0 || a != b || a != c || a.empty()) {
    pass = false;
    detail << "sweep bytes differ across repeats/threads; ";
  }

  const std::string m1 = run_cli("maxmin --n 4 --seed 99 --power 10", &code_a);
  const std::string m2 = run_cli("maxmin --n 4 --seed 99 --power 10", &code_b);
  if (code_a != 0 || m1 != m2 || m1.empty()) {
    pass = false;
    detail << "maxmin bytes differ across repeats; ";
  }

  const std::string v1 = run_cli("validate --samples 4000 --json --threads 1 --seed 5", &code_a);
  const std::string v2 = run_cli("validate --samples 4000 --json --threads 3 --seed 5", &code_b);
  if (code_a != 0 || v1 != v2 || v1.empty()) {
    pass = false;
    detail << "validate bytes differ across thread counts; ";
  }

  report(10, "CLI output is byte-identical for fixed seed, any thread count", pass,
         ms_since(start), detail.str());
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_cli_path = argv[1];

  criterion_1_analytic_fixtures();
  criterion_2_equal_value_certificates();
  criterion_3_optimality_oracles();
  criterion_4_closed_form_vs_monte_carlo();
  criterion_5_order_statistic_cdf();
  criterion_6_outage_directionality();
  criterion_7_fairness_trends();
  criterion_8_symmetric_coincidence();
  criterion_9_threshold_ordering();
  criterion_10_cli_determinism();

  std::printf("%d of 10 criteria failed\n", g_failures);
  return g_failures;
}
