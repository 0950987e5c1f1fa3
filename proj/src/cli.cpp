// Copyright 2026 The Anytime Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "anytime/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "anytime/analysis.hpp"
#include "anytime/confidence.hpp"
#include "anytime/error.hpp"
#include "anytime/format.hpp"
#include "anytime/sequential.hpp"
#include "anytime/serialization.hpp"
#include "anytime/server.hpp"
#include "anytime/simulation.hpp"

namespace anytime {
namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigFlags {
  std::string path;
  double mu = 0.0;
  double tau0 = 0.0;
  double tau1 = 1.0;
  double alpha = 0.05;
  std::string side;
  double rho_plus = 0.5;

  void attach(CLI::App* app) {
    app->add_option("--config", path, "JSON test configuration (default: $ANYTIME_CONFIG)");
    app->add_option("--mu", mu, "hypothesized mean");
    app->add_option("--tau0", tau0, "lower support bound");
    app->add_option("--tau1", tau1, "upper support bound");
    app->add_option("--alpha", alpha, "significance level");
    app->add_option("--side", side, "upper | lower | two-sided")
        ->check(CLI::IsMember({"upper", "lower", "two-sided"}));
    app->add_option("--rho-plus", rho_plus, "weight of the upper leg (two-sided)");
  }

  TestConfig build(const CLI::App* sub, bool need_mu) const {
    std::string file = path;
    if (file.empty()) {
      if (const char* env = std::getenv(kConfigEnv)) file = env;
    }
    TestConfig cfg;
    bool have_mu = false;
    if (!file.empty()) {
      std::ifstream in(file);
      if (!in) throw Error(ErrorCode::kInvalidConfig, "cannot read config file " + file);
      const Json j = Json::parse(in, nullptr, false);
      if (j.is_discarded()) throw Error(ErrorCode::kParse, "config file " + file + " is not JSON");
      cfg = config_from_json(j);
      have_mu = true;
    }
    if (sub->count("--mu")) {
      cfg.mu = mu;
      have_mu = true;
    }
    if (need_mu && !have_mu) throw UsageError("--mu is required (or a config file)");
    if (sub->count("--tau0")) cfg.tau0 = tau0;
    if (sub->count("--tau1")) cfg.tau1 = tau1;
    if (sub->count("--alpha")) cfg.alpha = alpha;
    if (side == "upper") cfg.side = UpperNull{};
    if (side == "lower") cfg.side = LowerNull{};
    if (side == "two-sided") cfg.side = TwoSided{rho_plus};
    if (sub->count("--rho-plus")) {
      auto* two = std::get_if<TwoSided>(&cfg.side);
      if (!two) throw UsageError("--rho-plus needs --side two-sided");
      two->rho_plus = rho_plus;
    }
    return cfg;
  }
};

std::vector<double> number_list(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw UsageError(std::string(flag) + ": cannot parse '" + part + "'");
    }
  }
  return out;
}

std::pair<double, double> pair_arg(const std::string& text, const char* flag) {
  const auto pos = text.find(':');
  if (pos == std::string::npos) throw UsageError(std::string(flag) + " expects a:b");
  const auto a = number_list(text.substr(0, pos), flag);
  const auto b = number_list(text.substr(pos + 1), flag);
  if (a.size() != 1 || b.size() != 1) throw UsageError(std::string(flag) + " expects a:b");
  return {a[0], b[0]};
}

struct PolicyFlags {
  double c = 0.0;
  std::string mixture;
  std::string schedule;
  std::string power;
  std::string file;

  void attach(CLI::App* app) {
    app->add_option("--c", c, "constant stake in [0,1]");
    app->add_option("--mixture", mixture, "uniform mixing density on a:b");
    app->add_option("--schedule", schedule, "comma-separated stakes c_0,c_1,...");
    app->add_option("--power", power, "power family d:r:s:m");
    app->add_option("--policy", file, "JSON policy file");
  }

  std::optional<StakePolicy> build(const CLI::App* sub) const {
    std::vector<StakePolicy> chosen;
    if (sub->count("--c")) chosen.emplace_back(ConstantStake{c});
    if (!mixture.empty()) {
      const auto [lo, hi] = pair_arg(mixture, "--mixture");
      chosen.emplace_back(MixtureSpec::uniform(lo, hi));
    }
    if (!schedule.empty()) chosen.emplace_back(StakeSchedule{number_list(schedule, "--schedule")});
    if (!power.empty()) {
      std::string text = power;
      for (char& ch : text) {
        if (ch == ':') ch = ',';
      }
      const auto v = number_list(text, "--power");
      if (v.size() != 4) throw UsageError("--power expects d:r:s:m");
      chosen.emplace_back(PowerFamily{v[0], v[1], v[2], v[3]});
    }
    if (!file.empty()) {
      std::ifstream in(file);
      if (!in) throw Error(ErrorCode::kInvalidPolicy, "cannot read policy file " + file);
      const Json j = Json::parse(in, nullptr, false);
      if (j.is_discarded()) throw Error(ErrorCode::kParse, "policy file " + file + " is not JSON");
      chosen.push_back(policy_from_json(j));
    }
    if (chosen.size() > 1) {
      throw UsageError("give at most one of --c, --mixture, --schedule, --power, --policy");
    }
    if (chosen.empty()) return std::nullopt;
    return chosen.front();
  }
};

struct OutputFlags {
  std::string format;
  std::string out_path;

  const std::string& or_default(const char* fallback) {
    if (format.empty()) format = fallback;
    return format;
  }

  void attach(CLI::App* app) {
    app->add_option("--format", format, "text | csv | json")
        ->check(CLI::IsMember({"text", "csv", "json"}));
    app->add_option("--out", out_path, "output file (default: standard output)");
  }
};

std::vector<double> read_input(const std::string& path) {
  if (path == "-") return read_observations(std::cin);
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParse, "cannot read input file " + path);
  return read_observations(in);
}

// JSON number rounded to nine significant digits.
Json j9(double x) {
  if (std::isinf(x)) return number_to_json(x);
  return std::strtod(format_number(x).c_str(), nullptr);
}

// ---------------------------------------------------------------------------

void cmd_test(const TestConfig& cfg, const StakePolicy& policy, const std::vector<double>& obs,
              const std::string& format, std::ostream& out) {
  SequentialTest test(cfg, policy);
  std::optional<std::size_t> first_reject;
  if (format == "csv") out << "k,t,log_m,log_m_max,stake,decision\n";
  for (double t : obs) {
    const TestSnapshot& s = test.observe(t);
    if (!first_reject && s.decision == Decision::kReject) first_reject = s.k;
    const double stake = s.stake.value_or(0.0);
    if (format == "csv") {
      out << s.k << ',' << format_number(t) << ',' << format_number(s.log_m) << ','
          << format_number(s.log_m_max) << ',' << format_number(stake) << ','
          << to_string(s.decision) << '\n';
    } else if (format == "json") {
      Json j = to_json(s);
      j["t"] = t;
      out << j.dump() << '\n';
    } else {
      out << "k=" << s.k << " t=" << format_number(t) << " log_m=" << format_number(s.log_m)
          << " log_m_max=" << format_number(s.log_m_max) << " stake=" << format_number(stake)
          << '\n';
    }
  }
  const TestSnapshot& s = test.snapshot();
  if (format == "json") {
    Json j{{"result", first_reject ? "REJECT" : "CONTINUE"},
           {"k", s.k},
           {"log_m", number_to_json(s.log_m)},
           {"log_m_max", number_to_json(s.log_m_max)},
           {"first_reject_k", first_reject ? Json(*first_reject) : Json(nullptr)}};
    out << j.dump() << '\n';
  } else if (format == "text") {
    if (first_reject) {
      out << "REJECT at k=" << *first_reject << '\n';
    } else {
      out << "CONTINUE, k=" << s.k << ", M=" << format_number(std::exp(s.log_m)) << '\n';
    }
  }
}

void cmd_bound(const TestConfig& cfg, const StakePolicy& policy, const std::vector<double>& obs,
               const std::string& format, std::ostream& out) {
  const auto rows = bound_trajectory(obs, cfg, policy);
  if (format == "csv") {
    out << "k,mu_r,running_min\n";
    for (const auto& r : rows) {
      out << r.k << ',' << format_number(r.mu_r) << ',' << format_number(r.running_min) << '\n';
    }
    return;
  }
  for (const auto& r : rows) {
    out << Json{{"k", r.k},        {"mu_r", j9(r.mu_r)},  {"running_min", j9(r.running_min)},
                {"lo", nullptr},   {"hi", nullptr},       {"empty", nullptr}}
               .dump()
        << '\n';
  }
}

void cmd_interval(const TestConfig& cfg, const MixtureSpec& spec, const std::vector<double>& obs,
                  const std::string& format, std::ostream& out) {
  const auto rows = interval_trajectory(obs, cfg, spec);
  if (format == "csv") {
    out << "k,lo,hi,empty,at_k_lo,at_k_hi,last_lo,last_hi\n";
    for (const auto& r : rows) {
      out << r.k << ',' << (r.running ? format_number(r.running->lo) : "") << ','
          << (r.running ? format_number(r.running->hi) : "") << ','
          << (r.running ? "false" : "true") << ',' << format_number(r.at_k.lo) << ','
          << format_number(r.at_k.hi) << ',' << format_number(r.last_nonempty.lo) << ','
          << format_number(r.last_nonempty.hi) << '\n';
    }
    return;
  }
  for (const auto& r : rows) {
    out << Json{{"k", r.k},
                {"mu_r", nullptr},
                {"running_min", nullptr},
                {"lo", r.running ? j9(r.running->lo) : Json(nullptr)},
                {"hi", r.running ? j9(r.running->hi) : Json(nullptr)},
                {"empty", !r.running},
                {"at_k", Json::array({j9(r.at_k.lo), j9(r.at_k.hi)})},
                {"last_nonempty", Json::array({j9(r.last_nonempty.lo), j9(r.last_nonempty.hi)})}}
               .dump()
        << '\n';
  }
}

struct AnalysisRow {
  double c = 0.0;
  double lambda = 0.0;
  double wald_mean = kInf;
  double wald_sd = kInf;
  std::optional<StopDistribution> exact;
};

void cmd_analyze(const TestConfig& cfg, const DistributionSpec& dist, std::vector<double> grid,
                 std::size_t n_max, const std::string& format, std::ostream& out) {
  cfg.validate();
  validate(dist, &cfg);
  const double cmax = c_max(dist, cfg);
  const OptimalStake opt = c_opt(dist, cfg);
  std::optional<double> kl;
  if (const auto* alt = std::get_if<Alt>(&dist); alt && cfg.tau1 == 1.0 && !cfg.tau0.value_or(0.0)) {
    kl = kl_alt(alt->nu, cfg.mu);
  }
  std::vector<AnalysisRow> rows;
  for (double c : grid) {
    AnalysisRow row;
    row.c = c;
    row.lambda = lambda_fn(dist, cfg, c);
    try {
      const WaldApproximation w = wald_n(dist, cfg, c);
      row.wald_mean = w.mean_n;
      row.wald_sd = w.sd_n;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kInfiniteExpectedSample) throw;
    }
    try {
      row.exact = exact_stop_dist(dist, cfg, c, n_max);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kStateSpaceTooLarge) throw;
    }
    rows.push_back(std::move(row));
  }
  auto q = [](const std::optional<std::size_t>& v) {
    return v ? std::to_string(*v) : std::string();
  };
  if (format == "csv") {
    out << "dist,c,lambda,wald_mean,wald_sd,exact_mean,exact_sd,exact_q50,exact_q75,exact_q90,"
           "mass_stopped\n";
    for (const auto& r : rows) {
      out << csv_field(describe(dist)) << ',' << format_number(r.c) << ','
          << format_number(r.lambda) << ',' << format_number(r.wald_mean) << ','
          << format_number(r.wald_sd) << ',';
      if (r.exact) {
        out << format_number(r.exact->mean) << ',' << format_number(r.exact->sd) << ','
            << q(r.exact->q50) << ',' << q(r.exact->q75) << ',' << q(r.exact->q90) << ','
            << format_number(r.exact->mass_stopped);
      } else {
        out << ",,,,,";
      }
      out << '\n';
    }
    return;
  }
  if (format == "json") {
    Json j{{"dist", describe(dist)},
           {"c_max", j9(cmax)},
           {"c_opt", j9(opt.c)},
           {"lambda_opt", j9(opt.lambda_at)},
           {"kl", kl ? j9(*kl) : Json(nullptr)}};
    if (cfg.tau0 && cfg.tau1) {
      const SizeBounds sb = size_bounds(cfg, opt.c);
      j["size_bounds"] = Json{{"c", j9(opt.c)}, {"lower", j9(sb.lower)}, {"upper", j9(sb.upper)}};
    }
    Json arr = Json::array();
    for (const auto& r : rows) {
      Json row{{"c", j9(r.c)},
               {"lambda", j9(r.lambda)},
               {"wald_mean", j9(r.wald_mean)},
               {"wald_sd", j9(r.wald_sd)}};
      if (r.exact) {
        row["exact"] = Json{{"mean", j9(r.exact->mean)},
                            {"sd", j9(r.exact->sd)},
                            {"mass_stopped", j9(r.exact->mass_stopped)}};
      }
      arr.push_back(row);
    }
    j["rows"] = arr;
    out << j.dump(2) << '\n';
    return;
  }
  out << "dist=" << describe(dist) << " mu=" << format_number(cfg.mu) << '\n';
  out << "c_max=" << format_number(cmax) << '\n';
  out << "c_opt=" << format_number(opt.c) << '\n';
  out << "lambda_opt=" << format_number(opt.lambda_at) << '\n';
  if (kl) out << "kl=" << format_number(*kl) << '\n';
  if (cfg.tau0 && cfg.tau1) {
    const SizeBounds sb = size_bounds(cfg, opt.c);
    out << "size_lower=" << format_number(sb.lower) << " size_upper=" << format_number(sb.upper)
        << '\n';
  }
  for (const auto& r : rows) {
    out << "c=" << format_number(r.c) << " lambda=" << format_number(r.lambda)
        << " wald_mean=" << format_number(r.wald_mean) << " wald_sd=" << format_number(r.wald_sd);
    if (r.exact) {
      out << " exact_mean=" << format_number(r.exact->mean)
          << " exact_sd=" << format_number(r.exact->sd)
          << " mass_stopped=" << format_number(r.exact->mass_stopped);
    }
    out << '\n';
  }
}

void cmd_simulate(const std::vector<Scenario>& scenarios, unsigned threads,
                  const std::string& format, std::ostream& out) {
  if (format == "json") {
    Json arr = Json::array();
    for (const Scenario& sc : scenarios) {
      const RunSummary s = experiment(sc, threads);
      arr.push_back(Json{{"scenario", to_json(sc)},
                         {"runs", s.runs},
                         {"mean_n", j9(s.n.mean)},
                         {"sd_n", j9(s.n.sd)},
                         {"se_n", j9(s.n.se)},
                         {"mean_n_precision", j9(s.n_precision.mean)},
                         {"sd_n_precision", j9(s.n_precision.sd)},
                         {"mean_tbar", j9(s.mean_tbar)},
                         {"sd_tbar", j9(s.sd_tbar)},
                         {"reject_rate", j9(s.reject_rate)},
                         {"not_stopped", s.not_stopped_count}});
    }
    out << arr.dump(2) << '\n';
    return;
  }
  out << summary_csv_header() << '\n';
  for (const Scenario& sc : scenarios) out << summary_csv_row(sc, experiment(sc, threads)) << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sequential tests, confidence bounds and simulations for a bounded mean"};
  app.require_subcommand(1);

  ConfigFlags cfg_flags;
  PolicyFlags policy_flags;
  OutputFlags output;
  std::string in_path;

  auto* test = app.add_subcommand("test", "run a test martingale over an observation file");
  auto* bound = app.add_subcommand("bound", "running upper confidence bound trajectory");
  auto* interval = app.add_subcommand("interval", "running confidence interval trajectory");
  auto* analyze = app.add_subcommand("analyze", "growth rate, optimal stake, sample-number laws");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo experiments");
  auto* serve = app.add_subcommand("serve", "start the session service");

  for (auto* sub : {test, bound, interval, analyze, simulate}) cfg_flags.attach(sub);
  for (auto* sub : {test, bound, interval, simulate}) policy_flags.attach(sub);
  for (auto* sub : {test, bound, interval}) {
    sub->add_option("--in", in_path, "observations: JSONL {\"t\": x} or one number per line")
        ->required();
  }
  for (auto* sub : {test, bound, interval, analyze, simulate}) output.attach(sub);

  std::string dist_text;
  std::string grid_text = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1";
  std::size_t n_max = 10000;
  analyze->add_option("--dist", dist_text, "alt:nu | scaled-alt:v:p | beta:a:b | point:t | finite:pts:probs")
      ->required();
  analyze->add_option("--grid", grid_text, "comma-separated stakes");
  analyze->add_option("--n-max", n_max, "horizon of the exact stopping law");

  std::string scenario_path;
  Scenario inline_sc;
  std::string sim_dist;
  std::string stop_rule = "reject";
  unsigned threads = 1;
  simulate->add_option("--scenario", scenario_path, "JSON scenario (object or array)");
  simulate->add_option("--dist", sim_dist, "distribution of T");
  simulate->add_option("--id", inline_sc.id, "scenario id");
  simulate->add_option("--runs", inline_sc.runs, "number of runs");
  simulate->add_option("--seed", inline_sc.seed, "64-bit seed");
  simulate->add_option("--cap", inline_sc.cap, "maximum steps per run");
  simulate->add_option("--stop-rule", stop_rule, "reject | precision | both")
      ->check(CLI::IsMember({"reject", "precision", "both"}));
  simulate->add_option("--precision-m", inline_sc.precision_m, "precision target m");
  simulate->add_option("--min-n", inline_sc.min_n, "first step the precision rule may stop");
  simulate->add_option("--threads", threads, "worker threads (0: all cores)");

  ServerOptions server_opts;
  if (const char* env = std::getenv(kTokenEnv)) server_opts.token = env;
  serve->add_option("--host", server_opts.host, "bind address");
  serve->add_option("--port", server_opts.port, "port");
  serve->add_option("--data-dir", server_opts.data_dir, "session log directory");
  serve->add_option("--token", server_opts.token, "required X-Auth-Token (default: $ANYTIME_TOKEN)");

  std::vector<const char*> argv{"anytime"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }

  std::ofstream file_out;
  auto sink = [&]() -> std::ostream& {
    if (output.out_path.empty()) return out;
    file_out.open(output.out_path);
    if (!file_out) throw Error(ErrorCode::kInvalidConfig, "cannot write " + output.out_path);
    return file_out;
  };

  try {
    if (test->parsed()) {
      const TestConfig cfg = cfg_flags.build(test, true);
      const auto policy = policy_flags.build(test);
      if (!policy) throw UsageError("test needs a policy: --c, --mixture, --schedule, --power or --policy");
      const auto obs = read_input(in_path);
      cmd_test(cfg, *policy, obs, output.or_default("text"), sink());
    } else if (bound->parsed()) {
      const TestConfig cfg = cfg_flags.build(bound, false);
      const StakePolicy policy = policy_flags.build(bound).value_or(MixtureSpec::uniform(0.0, 1.0));
      const auto obs = read_input(in_path);
      cmd_bound(cfg, policy, obs, output.or_default("json"), sink());
    } else if (interval->parsed()) {
      const TestConfig cfg = cfg_flags.build(interval, false);
      const StakePolicy policy =
          policy_flags.build(interval).value_or(MixtureSpec::uniform(-1.0, 1.0));
      const auto* spec = std::get_if<MixtureSpec>(&policy);
      if (!spec) throw UsageError("interval takes a mixture: --mixture a:b with a < 0 < b");
      const auto obs = read_input(in_path);
      cmd_interval(cfg, *spec, obs, output.or_default("json"), sink());
    } else if (analyze->parsed()) {
      const TestConfig cfg = cfg_flags.build(analyze, true);
      const DistributionSpec dist = parse_distribution(dist_text);
      cmd_analyze(cfg, dist, number_list(grid_text, "--grid"), n_max, output.or_default("text"), sink());
    } else if (simulate->parsed()) {
      std::vector<Scenario> scenarios;
      if (!scenario_path.empty()) {
        std::ifstream in(scenario_path);
        if (!in) throw Error(ErrorCode::kParse, "cannot read scenario file " + scenario_path);
        const Json j = Json::parse(in, nullptr, false);
        if (j.is_discarded()) throw Error(ErrorCode::kParse, scenario_path + " is not JSON");
        if (j.is_array()) {
          for (const auto& item : j) scenarios.push_back(scenario_from_json(item));
        } else {
          scenarios.push_back(scenario_from_json(j));
        }
      } else {
        if (sim_dist.empty()) throw UsageError("simulate needs --scenario or --dist");
        inline_sc.cfg = cfg_flags.build(simulate, true);
        inline_sc.dist = parse_distribution(sim_dist);
        const auto policy = policy_flags.build(simulate);
        if (!policy) throw UsageError("simulate needs a policy: --c, --mixture, --schedule, --power or --policy");
        inline_sc.policy = *policy;
        inline_sc.stop_rule = parse_stop_rule(stop_rule);
        scenarios.push_back(inline_sc);
      }
      cmd_simulate(scenarios, threads, output.or_default("csv"), sink());
    } else if (serve->parsed()) {
      if (!serve_sessions(server_opts)) {
        err << "error: cannot listen on " << server_opts.host << ":" << server_opts.port << '\n';
        return 1;
      }
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace anytime
