// Command-line front end: single solves, baseline comparisons, Monte Carlo
// validation, and CSV parameter sweeps.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "nomafair/nomafair.hpp"

namespace {

using namespace nomafair;

// All numeric output goes through here: nine significant digits, '.' decimal
// separator, no locale dependence.
std::string g9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string json_array(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += g9(v[i]);
  }
  s += "]";
  return s;
}

std::vector<double> parse_number_list(const std::string& text, const char* field) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string token = text.substr(pos, comma - pos);
    if (token.empty()) throw InvalidConfig(field, std::string(field) + ": empty entry in list");
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      throw InvalidConfig(field, std::string(field) + ": cannot parse '" + token + "'");
    }
    if (used != token.size())
      throw InvalidConfig(field, std::string(field) + ": trailing junk in '" + token + "'");
    out.push_back(v);
    if (comma == text.size()) break;
    pos = comma + 1;
  }
  return out;
}

struct ModelFlags {
  int n = 0;  // 0 = take from gains
  double power = 10.0;
  double noise = 1.0;
  double sigma_h2 = 1.0;
  double rate = 0.05;
  std::string gains;
  std::string config_path;

  CLI::Option* opt_n = nullptr;
  CLI::Option* opt_power = nullptr;
  CLI::Option* opt_noise = nullptr;
  CLI::Option* opt_sigma = nullptr;
  CLI::Option* opt_rate = nullptr;
  CLI::Option* opt_gains = nullptr;
};

void add_model_flags(CLI::App* sub, ModelFlags& m) {
  m.opt_n = sub->add_option("--n", m.n, "number of users");
  m.opt_power = sub->add_option("--power", m.power, "total power P, linear (default 10)");
  m.opt_noise = sub->add_option("--noise", m.noise, "noise variance (default 1)");
  m.opt_sigma = sub->add_option("--sigma-h2", m.sigma_h2, "channel variance (default 1)");
  m.opt_rate = sub->add_option("--rate", m.rate, "target rate r0, BPCU (default 0.05)");
  m.opt_gains = sub->add_option("--gains", m.gains,
                                "explicit channel gains, comma separated (sorted ascending)");
  sub->add_option("--config", m.config_path, "key=value config file; flags override");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Flat key=value file, '#' starts a comment. Values already set on the
// command line win.
void apply_config_file(const ModelFlags& m, SystemConfig& cfg, std::string& gains_text) {
  if (m.config_path.empty()) return;
  std::ifstream in(m.config_path);
  if (!in) throw InvalidConfig("config", "cannot open config file: " + m.config_path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidConfig("config", "missing '=' at line " + std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto as_double = [&] { return parse_number_list(value, key.c_str()).at(0); };
    if (key == "n_users") {
      if (!*m.opt_n) cfg.n_users = static_cast<int>(as_double());
    } else if (key == "total_power") {
      if (!*m.opt_power) cfg.total_power = as_double();
    } else if (key == "noise_variance") {
      if (!*m.opt_noise) cfg.noise_variance = as_double();
    } else if (key == "channel_variance") {
      if (!*m.opt_sigma) cfg.channel_variance = as_double();
    } else if (key == "target_rate") {
      if (!*m.opt_rate) cfg.target_rate = as_double();
    } else if (key == "bisect_tol") {
      cfg.bisect_tol = as_double();
    } else if (key == "root_tol") {
      cfg.root_tol = as_double();
    } else if (key == "max_iters") {
      cfg.max_iters = static_cast<int>(as_double());
    } else if (key == "gains") {
      if (!*m.opt_gains) gains_text = value;
    } else {
      throw InvalidConfig("config", "unknown config key '" + key + "'");
    }
  }
}

struct ResolvedInputs {
  SystemConfig cfg;
  std::optional<ChannelRealization> chan;
};

ResolvedInputs resolve(const ModelFlags& m, double tol_override, std::uint64_t seed,
                       bool want_gains) {
  ResolvedInputs r;
  std::string gains_text = m.gains;
  if (*m.opt_n) r.cfg.n_users = m.n;
  if (*m.opt_power) r.cfg.total_power = m.power;
  if (*m.opt_noise) r.cfg.noise_variance = m.noise;
  if (*m.opt_sigma) r.cfg.channel_variance = m.sigma_h2;
  if (*m.opt_rate) r.cfg.target_rate = m.rate;
  // defaults for whatever the file does not override
  SystemConfig defaults;
  if (!*m.opt_n) r.cfg.n_users = defaults.n_users;
  if (!*m.opt_power) r.cfg.total_power = defaults.total_power;
  if (!*m.opt_noise) r.cfg.noise_variance = defaults.noise_variance;
  if (!*m.opt_sigma) r.cfg.channel_variance = defaults.channel_variance;
  if (!*m.opt_rate) r.cfg.target_rate = defaults.target_rate;
  apply_config_file(m, r.cfg, gains_text);
  if (tol_override > 0.0) r.cfg.bisect_tol = tol_override;

  if (!gains_text.empty()) {
    std::vector<double> g = parse_number_list(gains_text, "gains");
    std::sort(g.begin(), g.end());
    if (*m.opt_n && r.cfg.n_users != static_cast<int>(g.size()))
      throw InvalidConfig("gains", "--n disagrees with the number of gains");
    r.cfg.n_users = static_cast<int>(g.size());
    validate_config(r.cfg);
    r.chan = ChannelRealization(std::move(g));
  } else if (want_gains) {
    validate_config(r.cfg);
    r.chan = sample_gains(r.cfg, seed);
  } else {
    validate_config(r.cfg);
  }
  return r;
}

// stdout plus optional --out copy
void emit(const std::string& text, const std::string& out_path) {
  std::cout << text;
  if (!out_path.empty()) {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw InvalidConfig("out", "cannot write output file: " + out_path);
    f << text;
    if (!f) throw InvalidConfig("out", "cannot write output file: " + out_path);
  }
}

int run_maxmin(const ModelFlags& m, double tol, std::uint64_t seed, const std::string& out) {
  ResolvedInputs in = resolve(m, tol, seed, /*want_gains=*/true);
  const SolverResult res = solve_maxmin(*in.chan, in.cfg);
  std::vector<double> rates(static_cast<std::size_t>(in.cfg.n_users));
  for (int i = 1; i <= in.cfg.n_users; ++i)
    rates[static_cast<std::size_t>(i - 1)] = achievable_rate(res.allocation, *in.chan, in.cfg, i, i);
  std::string json = "{\"t_star\":" + g9(res.objective) +
                     ",\"beta\":" + json_array(res.allocation.beta()) +
                     ",\"iterations\":" + std::to_string(res.iterations) +
                     ",\"per_user_rates\":" + json_array(rates) + "}\n";
  emit(json, out);
  return 0;
}

int run_outage(const ModelFlags& m, double tol, std::uint64_t seed, const std::string& out) {
  ResolvedInputs in = resolve(m, tol, seed, /*want_gains=*/false);
  const OutageSolveResult res = solve_minmax_outage(in.cfg);
  std::string json = "{\"t_star\":" + g9(res.objective) + ",\"beta\":" + json_array(res.beta) +
                     ",\"zeta\":" + json_array(res.zeta) +
                     ",\"feasible\":" + (res.infeasible_at_full_power ? "false" : "true") + "}\n";
  emit(json, out);
  return 0;
}

int run_baselines(const ModelFlags& m, double tol, std::uint64_t seed, const std::string& out) {
  ResolvedInputs in = resolve(m, tol, seed, /*want_gains=*/true);
  const SystemConfig& cfg = in.cfg;

  const OutageSolveResult opt = solve_minmax_outage(cfg);
  const FixedNomaOutage fx = fixed_noma_outage(cfg);
  const double td_out = tdma_outage(cfg);

  const SolverResult noma = solve_maxmin(*in.chan, cfg);
  const TdmaResult tdma = tdma_maxmin(*in.chan, cfg);

  std::string json =
      "{\"average_csi\":{\"noma_minmax_outage\":" + g9(opt.objective) +
      ",\"tdma_outage\":" + g9(td_out) + ",\"fixed_noma_max_outage\":" + g9(fx.max_outage) +
      ",\"fixed_noma_per_user\":" + json_array(fx.per_user_outage) +
      "},\"instantaneous_csi\":{\"gains\":" + json_array(in.chan->gains()) +
      ",\"noma_maxmin_rate\":" + g9(noma.objective) +
      ",\"tdma_maxmin_rate\":" + g9(tdma.objective) + "}}\n";
  emit(json, out);
  return 0;
}

enum class Figure { kFairnessVsPower, kNomaVsTdma, kOutageVsPower };

int run_sweep(const ModelFlags& m, double tol, std::uint64_t seed, const std::string& out,
              const std::string& figure, double pmin_db, double pmax_db, double pstep_db,
              const std::string& n_list_text, const std::string& rate_list_text,
              long realizations, int threads) {
  Figure fig;
  if (figure == "fairness-vs-power")
    fig = Figure::kFairnessVsPower;
  else if (figure == "noma-vs-tdma")
    fig = Figure::kNomaVsTdma;
  else if (figure == "outage-vs-power")
    fig = Figure::kOutageVsPower;
  else
    throw InvalidConfig("figure", "unknown figure '" + figure + "'");

  if (!(pstep_db > 0.0)) throw InvalidConfig("pstep-db", "power step must be positive");
  std::vector<double> powers_db;
  for (double p = pmin_db; p <= pmax_db + 1e-9; p += pstep_db) powers_db.push_back(p);
  std::vector<double> n_list_d = parse_number_list(
      n_list_text.empty() ? (fig == Figure::kOutageVsPower ? "5" : "5,10,20") : n_list_text,
      "n-list");
  std::vector<int> n_list;
  for (double v : n_list_d) {
    if (v < 1 || v != std::floor(v)) throw InvalidConfig("n-list", "user counts must be integers");
    n_list.push_back(static_cast<int>(v));
  }
  std::vector<double> rate_list = parse_number_list(
      rate_list_text.empty() ? "0.05,0.5" : rate_list_text, "rate-list");
  if (powers_db.empty() || n_list.empty() || rate_list.empty() || realizations < 1)
    throw InvalidConfig("grid", "sweep grid is empty");

  SystemConfig base;
  {
    // reuse model flags for noise/variance/tolerances; n and rate come from grid
    ModelFlags copy = m;
    ResolvedInputs in = resolve(copy, tol, seed, /*want_gains=*/false);
    base = in.cfg;
  }

  std::ostringstream csv;
  if (fig == Figure::kOutageVsPower) {
    csv << "n_users,power_db,rate_target_bpcu,scheme,minmax_outage\n";
    for (int n : n_list) {
      for (double r0 : rate_list) {
        for (double pdb : powers_db) {
          SystemConfig cfg = base;
          cfg.n_users = n;
          cfg.target_rate = r0;
          cfg.total_power = db_to_linear(pdb);
          validate_config(cfg);
          const double noma = solve_minmax_outage(cfg).objective;
          const double tdma = tdma_outage(cfg);
          const double fixed = fixed_noma_outage(cfg).max_outage;
          csv << n << "," << g9(pdb) << "," << g9(r0) << ",noma," << g9(noma) << "\n";
          csv << n << "," << g9(pdb) << "," << g9(r0) << ",tdma," << g9(tdma) << "\n";
          csv << n << "," << g9(pdb) << "," << g9(r0) << ",fixed_noma," << g9(fixed) << "\n";
        }
      }
    }
  } else {
    csv << "n_users,power_db,power_linear,scheme,mean_fairness_rate_bpcu,num_realizations,seed\n";
    struct Point {
      int n;
      double pdb;
      double noma_mean = 0.0;
      double tdma_mean = 0.0;
    };
    std::vector<Point> points;
    for (int n : n_list)
      for (double pdb : powers_db) points.push_back({n, pdb});

    const bool with_tdma = fig == Figure::kNomaVsTdma;
    auto eval_point = [&](Point& pt) {
      SystemConfig cfg = base;
      cfg.n_users = pt.n;
      cfg.total_power = db_to_linear(pt.pdb);
      validate_config(cfg);
      long double noma_acc = 0.0L, tdma_acc = 0.0L;
      for (long k = 0; k < realizations; ++k) {
        const std::uint64_t stream = (static_cast<std::uint64_t>(pt.n) << 42) ^
                                     (static_cast<std::uint64_t>(pt.pdb * 1000.0 + 4e6) << 21) ^
                                     static_cast<std::uint64_t>(k);
        CounterRng rng(seed, stream);
        ChannelRealization chan(sample_sorted_gains(cfg.n_users, cfg.channel_variance, rng));
        noma_acc += solve_maxmin(chan, cfg).objective;
        if (with_tdma) tdma_acc += tdma_maxmin(chan, cfg).objective;
      }
      pt.noma_mean = static_cast<double>(noma_acc / realizations);
      pt.tdma_mean = static_cast<double>(tdma_acc / realizations);
    };

    if (threads > 1) {
      std::atomic<std::size_t> next{0};
      auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < points.size(); i = next.fetch_add(1))
          eval_point(points[i]);
      };
      std::vector<std::thread> pool;
      for (int i = 0; i < std::min<int>(threads, static_cast<int>(points.size())); ++i)
        pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    } else {
      for (auto& pt : points) eval_point(pt);
    }

    for (const Point& pt : points) {
      csv << pt.n << "," << g9(pt.pdb) << "," << g9(db_to_linear(pt.pdb)) << ",noma,"
          << g9(pt.noma_mean) << "," << realizations << "," << seed << "\n";
      if (with_tdma)
        csv << pt.n << "," << g9(pt.pdb) << "," << g9(db_to_linear(pt.pdb)) << ",tdma,"
            << g9(pt.tdma_mean) << "," << realizations << "," << seed << "\n";
    }
  }

  if (out.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!f) throw InvalidConfig("out", "cannot write output file: " + out);
    f << csv.str();
    if (!f) throw InvalidConfig("out", "cannot write output file: " + out);
  }
  return 0;
}

struct ValidateScenario {
  std::string name;
  SystemConfig cfg;
  std::vector<double> beta;
};

int run_validate(std::uint64_t seed, const std::string& out, double samples_d,
                 const std::string& scenario, bool corrupt_lambda, bool as_json, int threads) {
  if (samples_d < 1.0) throw InvalidConfig("samples", "validate needs at least one sample");
  const auto samples = static_cast<std::int64_t>(samples_d);

  std::vector<ValidateScenario> all;
  {
    SystemConfig c;
    c.n_users = 1;
    c.total_power = 10.0;
    c.target_rate = 1.0;
    all.push_back({"single-user", c, {1.0}});
    c.n_users = 2;
    all.push_back({"fixed-noma-n2", c, fixed_noma_outage(c).beta});
    c.n_users = 5;
    c.target_rate = 0.5;
    all.push_back({"fixed-noma-n5", c, fixed_noma_outage(c).beta});
    ValidateScenario opt{"optimal-n5", c, {}};
    opt.beta = solve_minmax_outage(c).beta;
    all.push_back(std::move(opt));
  }
  std::vector<ValidateScenario> chosen;
  for (auto& s : all)
    if (scenario == "all" || scenario == s.name) chosen.push_back(std::move(s));
  if (chosen.empty()) throw InvalidConfig("scenario", "unknown scenario '" + scenario + "'");

  bool ok = true;
  double max_abs = 0.0, max_rel = 0.0;
  std::ostringstream text, json;
  json << "{\"samples\":" << samples << ",\"seed\":" << seed << ",\"scenarios\":[";
  bool first = true;
  for (const auto& s : chosen) {
    const PowerAllocation alloc(s.beta, 1e-9);
    const DecodingThresholds th = decoding_thresholds(alloc, s.cfg);
    const double lambda = s.cfg.lambda() * (corrupt_lambda ? 1.1 : 1.0);
    const OutageStats mc = estimate_outage(alloc, s.cfg, samples, seed, threads);
    text << "scenario " << s.name << " (N=" << s.cfg.n_users << ", P=" << g9(s.cfg.total_power)
         << ", r0=" << g9(s.cfg.target_rate) << ")\n";
    if (!first) json << ",";
    first = false;
    json << "{\"name\":\"" << s.name << "\",\"users\":[";
    for (int i = 1; i <= s.cfg.n_users; ++i) {
      const double zh = th.zeta_hat[static_cast<std::size_t>(i - 1)];
      const double closed = std::isinf(zh) ? 1.0 : ordered_cdf(zh, i, s.cfg.n_users, lambda);
      const double est = mc.per_user_outage[static_cast<std::size_t>(i - 1)];
      // binomial deviation under the closed-form hypothesis; stays meaningful
      // even when a small run sees no outage events at all
      const double three_sigma =
          3.0 * std::sqrt(closed * (1.0 - closed) / static_cast<double>(samples));
      const double delta = std::abs(closed - est);
      const double rel = closed > 0.0 ? delta / closed : 0.0;
      const bool pass = delta <= three_sigma;
      ok = ok && pass;
      max_abs = std::max(max_abs, delta);
      max_rel = std::max(max_rel, rel);
      text << "  user " << i << ": closed=" << g9(closed) << " mc=" << g9(est) << " |delta|="
           << g9(delta) << " 3sigma=" << g9(three_sigma) << (pass ? "" : "  EXCEEDS 3-SIGMA")
           << "\n";
      if (i > 1) json << ",";
      json << "{\"user\":" << i << ",\"closed_form\":" << g9(closed) << ",\"mc\":" << g9(est)
           << ",\"abs_delta\":" << g9(delta) << ",\"three_sigma\":" << g9(three_sigma)
           << ",\"pass\":" << (pass ? "true" : "false") << "}";
    }
    json << "]}";
  }
  text << "max |delta| = " << g9(max_abs) << ", max relative = " << g9(max_rel) << " -> "
       << (ok ? "PASS" : "FAIL") << "\n";
  json << "],\"max_abs_delta\":" << g9(max_abs) << ",\"max_rel_delta\":" << g9(max_rel)
       << ",\"pass\":" << (ok ? "true" : "false") << "}\n";

  emit(as_json ? json.str() : text.str(), out);
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal power allocation for fairness in superposition (NOMA) downlink"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 12345;
  double tol = 0.0;  // 0 = keep config default
  std::string out_path;
  bool as_json = false;
  int threads = 1;
  app.add_option("--seed", seed, "RNG seed (default 12345)");
  app.add_option("--tol", tol, "bisection tolerance override");
  app.add_option("--out", out_path, "write output to this file as well");
  app.add_flag("--json", as_json, "JSON output where the default is text");
  app.add_option("--threads", threads, "worker threads (results are identical for any count)");

  ModelFlags mm, mo, mb, ms;

  CLI::App* c_maxmin = app.add_subcommand("maxmin", "max-min rate allocation, known gains");
  add_model_flags(c_maxmin, mm);

  CLI::App* c_outage = app.add_subcommand("outage", "min-max outage allocation, average gains");
  add_model_flags(c_outage, mo);

  CLI::App* c_base = app.add_subcommand("baselines", "compare against TDMA and static splits");
  add_model_flags(c_base, mb);

  CLI::App* c_sweep = app.add_subcommand("sweep", "write a CSV parameter sweep");
  add_model_flags(c_sweep, ms);
  std::string figure, n_list_text, rate_list_text;
  double pmin_db = 0.0, pmax_db = 40.0, pstep_db = 5.0;
  long realizations = 1000;
  c_sweep->add_option("--figure", figure,
                      "fairness-vs-power | noma-vs-tdma | outage-vs-power")->required();
  c_sweep->add_option("--pmin-db", pmin_db, "grid start, dB (default 0)");
  c_sweep->add_option("--pmax-db", pmax_db, "grid end, dB (default 40)");
  c_sweep->add_option("--pstep-db", pstep_db, "grid step, dB (default 5)");
  c_sweep->add_option("--n-list", n_list_text, "user counts (default 5,10,20; outage sweep 5)");
  c_sweep->add_option("--rate-list", rate_list_text, "rate targets for outage sweep (default 0.05,0.5)");
  c_sweep->add_option("--realizations", realizations, "channel draws per grid point (default 1000)");

  CLI::App* c_val = app.add_subcommand("validate", "closed forms against Monte Carlo");
  double samples_d = 1e6;
  std::string scenario = "all";
  bool corrupt_lambda = false;
  c_val->add_option("--samples", samples_d, "Monte Carlo samples (default 1e6)");
  c_val->add_option("--scenario", scenario,
                    "all | single-user | fixed-noma-n2 | fixed-noma-n5 | optimal-n5");
  c_val->add_flag("--corrupt-lambda", corrupt_lambda,
                  "debug: perturb the closed form to force a failure");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(c_maxmin)) return run_maxmin(mm, tol, seed, out_path);
    if (app.got_subcommand(c_outage)) return run_outage(mo, tol, seed, out_path);
    if (app.got_subcommand(c_base)) return run_baselines(mb, tol, seed, out_path);
    if (app.got_subcommand(c_sweep))
      return run_sweep(ms, tol, seed, out_path, figure, pmin_db, pmax_db, pstep_db, n_list_text,
                       rate_list_text, realizations, threads);
    if (app.got_subcommand(c_val))
      return run_validate(seed, out_path, samples_d, scenario, corrupt_lambda, as_json, threads);
  } catch (const InvalidConfig& e) {
    std::cerr << "config error (" << e.field() << "): " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
