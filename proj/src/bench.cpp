// Copyright 2026 The collabtopm Authors.
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

#include "collabtopm/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "collabtopm/errors.hpp"
#include "collabtopm/fixed_confidence.hpp"
#include "collabtopm/fixed_time.hpp"
#include "collabtopm/instance_gen.hpp"
#include "collabtopm/reduction.hpp"

namespace collabtopm {

namespace {

constexpr std::size_t kOpenRoundCap = std::size_t{1} << 20;

struct NamedAlgorithm {
  Algorithm id;
  std::string_view name;
};

constexpr NamedAlgorithm kAlgorithms[] = {
    {Algorithm::kSimple, "simple"},       {Algorithm::kCollab, "collab"},
    {Algorithm::kGeneral, "general"},     {Algorithm::kImproved, "improved"},
    {Algorithm::kReduce, "reduce"},       {Algorithm::kSelectMth, "select-mth"},
    {Algorithm::kFixedConf, "fixed-conf"},
};

std::uint64_t ceil_budget(long double t) {
  if (!(t >= 0.0L) || t >= 1.8e19L) {
    throw InvalidParams("budget out of range");
  }
  return static_cast<std::uint64_t>(std::ceil(t));
}

double pivot_complexity(const Problem& p) {
  try {
    return complexity_h(p.instance.means(), p.m);
  } catch (const Error&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

std::uint64_t reduce_formula(double h, std::size_t n, std::size_t k,
                             const Constants& c) {
  const long double base = reduction_budget(h, n, k, 1.0 / 25.0, 1.0, c);
  return ceil_budget(std::numbers::pi_v<long double> *
                     std::numbers::pi_v<long double> / 6.0L * base);
}

std::uint64_t formula_budget(const ExperimentConfig& cfg) {
  const Problem& p = cfg.problem;
  const std::size_t n = p.instance.size();
  const std::size_t k = cfg.agents;
  const Constants& c = cfg.constants;
  const double h = complexity_h(p.instance.means(), p.m);
  switch (cfg.algorithm) {
    case Algorithm::kSimple:
      return simple_budget(h, n, k, cfg.delta, c);
    case Algorithm::kCollab:
      return collab_budget(h, n, k, c);
    case Algorithm::kGeneral:
      return general_budget(h, n, k, c);
    case Algorithm::kReduce:
      return reduce_formula(h, n, k, c);
    case Algorithm::kImproved:
      return ceil_budget(2.0L * std::max(reduce_formula(h, n, k, c),
                                         general_budget(h, n, k, c)));
    case Algorithm::kSelectMth:
      return ceil_budget(4.0L * std::max(reduce_formula(h, n, k, c),
                                         general_budget(h, n, k, c)));
    case Algorithm::kFixedConf:
      break;
  }
  return kUnlimitedHorizon;
}

std::string csv_double(double x) {
  std::ostringstream os;
  os << std::setprecision(10) << x;
  return os.str();
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw InvalidParams("bad value for " + key + ": " + text);
  }
  return value;
}

template <typename T>
T get(const KeyValues& kv, const std::string& key, T fallback) {
  const auto it = kv.find(key);
  return it == kv.end() ? fallback : parse_number<T>(key, it->second);
}

template <typename T>
std::vector<T> get_list(const KeyValues& kv, const std::string& key) {
  std::vector<T> out;
  const auto it = kv.find(key);
  if (it == kv.end()) return out;
  for (const auto& s : split_list(it->second)) out.push_back(parse_number<T>(key, s));
  return out;
}

// Scalar view of a key that may hold a sweep list.
template <class T>
T first_of(const KeyValues& kv, const std::string& key, T fallback) {
  const std::vector<T> v = get_list<T>(kv, key);
  return v.empty() ? fallback : v.front();
}

Problem problem_from_keys(const KeyValues& kv) {
  if (const auto it = kv.find("instance"); it != kv.end()) {
    return read_problem(it->second);
  }
  const std::string gen = kv.contains("gen") ? kv.at("gen") : "uniform";
  const auto n = get<std::size_t>(kv, "n", 64);
  const auto gen_seed = get<std::uint64_t>(kv, "gen_seed", 7);
  CounterRng rng(gen_seed, 0, kCoordinatorStream);
  if (gen == "hard") {
    const double c = get<double>(kv, "C", 0.1);
    const double mu = get<double>(kv, "mu", 0.5);
    const auto k = first_of<std::size_t>(kv, "K", 1);
    HardInstance hard = gen_hard(c, mu, n, k, rng);
    return Problem{std::move(hard.instance), hard.m};
  }
  ClusterSpec spec;
  if (gen == "clustered") {
    spec.kind = ClusterSpec::Kind::kClustered;
  } else if (gen != "uniform") {
    throw InvalidParams("unknown generator: " + gen);
  }
  spec.lo = get<double>(kv, "lo", spec.lo);
  spec.hi = get<double>(kv, "hi", spec.hi);
  spec.clusters = get<std::size_t>(kv, "clusters", spec.clusters);
  spec.spread = get<double>(kv, "spread", spec.spread);
  const auto m = get<std::size_t>(kv, "m", 1);
  const double gap_min = get<double>(kv, "gap_min", 0.1);
  return Problem{gen_random(n, m, gap_min, spec, rng), m};
}

constexpr std::string_view kConstantNames[] = {
    "c0", "c1", "c2", "general_multiplier", "c_f", "c_g", "c_a", "c_r",
    "partition_exponent"};

double* constant_slot(Constants& c, std::string_view name) {
  if (name == "c0") return &c.c0;
  if (name == "c1") return &c.c1;
  if (name == "c2") return &c.c2;
  if (name == "general_multiplier") return &c.general_multiplier;
  if (name == "c_f") return &c.c_f;
  if (name == "c_g") return &c.c_g;
  if (name == "c_a") return &c.c_a;
  if (name == "c_r") return &c.c_r;
  if (name == "partition_exponent") return &c.partition_exponent;
  throw InvalidParams("unknown constant: " + std::string(name));
}

}  // namespace

std::string_view algorithm_name(Algorithm a) {
  for (const auto& e : kAlgorithms) {
    if (e.id == a) return e.name;
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  for (const auto& e : kAlgorithms) {
    if (e.name == name) return e.id;
  }
  throw InvalidParams("unknown algorithm: " + std::string(name));
}

std::string_view budget_mode_name(BudgetMode m) {
  switch (m) {
    case BudgetMode::kAbsolute: return "absolute";
    case BudgetMode::kMultiplier: return "multiplier";
    case BudgetMode::kFormula: return "formula";
    case BudgetMode::kConfidence: return "confidence";
  }
  return "?";
}

BudgetMode parse_budget_mode(std::string_view name) {
  for (auto m : {BudgetMode::kAbsolute, BudgetMode::kMultiplier,
                 BudgetMode::kFormula, BudgetMode::kConfidence}) {
    if (budget_mode_name(m) == name) return m;
  }
  throw InvalidParams("unknown budget mode: " + std::string(name));
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw InvalidParams("trials must be >= 1");
  if (agents < 1) throw InvalidParams("K must be >= 1");
  if (workers < 1) throw InvalidParams("workers must be >= 1");
  const std::size_t n = problem.instance.size();
  if (problem.m < 1 || problem.m > n) throw InvalidParams("need 1 <= m <= n");
  const bool fc = algorithm == Algorithm::kFixedConf;
  if (fc != (mode == BudgetMode::kConfidence)) {
    throw InvalidParams("fixed-conf runs take delta; fixed-time runs take T");
  }
  if (mode == BudgetMode::kAbsolute && horizon < 1) {
    throw InvalidParams("T must be >= 1");
  }
  if (mode == BudgetMode::kMultiplier && (!(lambda > 0.0) || exponent_rounds < 1)) {
    throw InvalidParams("multiplier needs lambda > 0 and R >= 1");
  }
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidParams("delta not in (0,1)");
  if (algorithm != Algorithm::kSelectMth || problem.m < n) {
    check_pivot(problem.instance.means(), problem.m);
  }
}

std::size_t simple_rounds(const ExperimentConfig& config) {
  if (config.rounds > 0) return config.rounds;
  const auto n = static_cast<double>(config.problem.instance.size());
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::log2(n))));
}

std::uint64_t resolve_horizon(const ExperimentConfig& config) {
  switch (config.mode) {
    case BudgetMode::kAbsolute:
      return config.horizon;
    case BudgetMode::kMultiplier: {
      const double h = complexity_h(config.problem.instance.means(),
                                    config.problem.m);
      const auto r = static_cast<long double>(config.exponent_rounds);
      const long double denom = std::pow(
          static_cast<long double>(config.agents), (r - 1.0L) / r);
      return ceil_budget(static_cast<long double>(config.lambda) * h / denom);
    }
    case BudgetMode::kFormula:
      return formula_budget(config);
    case BudgetMode::kConfidence:
      break;
  }
  return kUnlimitedHorizon;
}

std::size_t resolve_round_cap(const ExperimentConfig& config) {
  if (config.round_cap > 0) return config.round_cap;
  const std::size_t n = config.problem.instance.size();
  switch (config.algorithm) {
    case Algorithm::kSimple:
      return simple_rounds(config) + 1;
    case Algorithm::kCollab:
      return collab_round_bound(n, config.agents, config.constants);
    case Algorithm::kGeneral:
      return collab_round_bound(n, config.agents, config.constants) + 2;
    case Algorithm::kFixedConf:
      return kFixedConfidenceRoundCap;
    default:
      return kOpenRoundCap;
  }
}

ExperimentReport run_trial(const ExperimentConfig& config, std::uint64_t trial,
                           std::ostream* transcript) {
  ExperimentReport report;
  report.trial = trial;
  report.seed = config.seed;
  const Problem& p = config.problem;
  const std::size_t n = p.instance.size();
  std::optional<Session> session;
  try {
    const CollabConfig cc{config.agents, resolve_horizon(config),
                          resolve_round_cap(config)};
    session.emplace(p.instance, cc, config.seed, trial);
    const std::vector<ArmId> arms = all_arms(n);
    const std::vector<ArmId> truth =
        config.algorithm == Algorithm::kSelectMth
            ? std::vector<ArmId>{rank_order(p.instance.means())[p.m - 1]}
            : true_top_m(p.instance.means(), p.m);
    const Constants& c = config.constants;
    switch (config.algorithm) {
      case Algorithm::kSimple:
        report.returned = collab_top_m_simple(*session, arms, p.m, cc.horizon,
                                              simple_rounds(config))
                              .selected;
        break;
      case Algorithm::kCollab:
        report.returned =
            collab_top_m(*session, arms, p.m, cc.horizon, c).selected;
        break;
      case Algorithm::kGeneral: {
        auto g = collab_top_m_general(*session, arms, p.m, cc.horizon, c);
        report.returned = std::move(g.selected);
        report.fallback = g.fallback;
        break;
      }
      case Algorithm::kImproved: {
        auto g = collab_top_m_improved(*session, arms, p.m, cc.horizon, c);
        report.returned = std::move(g.selected);
        report.fallback = g.fallback || g.reduction_fallback;
        break;
      }
      case Algorithm::kReduce: {
        auto r = reduction_general(*session, arms, p.m, cc.horizon, c);
        report.returned = std::move(r.candidates);
        report.fallback = r.fallback;
        break;
      }
      case Algorithm::kSelectMth:
        report.returned = {select_mth_arm(*session, arms, p.m, cc.horizon, c)};
        break;
      case Algorithm::kFixedConf:
        report.returned =
            collab_top_m_fixed_conf(*session, arms, p.m, config.delta).selected;
        break;
    }
    std::sort(report.returned.begin(), report.returned.end());
    if (config.algorithm == Algorithm::kReduce) {
      const auto cap = static_cast<std::size_t>(
          std::ceil(16.0 * std::numbers::e * static_cast<double>(p.m)));
      report.correct = !report.fallback && report.returned.size() <= cap &&
                       std::includes(report.returned.begin(),
                                     report.returned.end(), truth.begin(),
                                     truth.end());
    } else {
      report.correct = report.returned == truth;
    }
  } catch (const BudgetExceeded& e) {
    report.error = std::string("BudgetExceeded: ") + e.what();
  } catch (const RoundCapExceeded& e) {
    report.error = std::string("RoundCapExceeded: ") + e.what();
  } catch (const Error& e) {
    report.error = e.what();
  }
  if (session) {
    report.rounds_used = session->rounds_used();
    report.time_used = session->time_used();
    report.agent_totals = session->ledger().agent_totals();
    if (transcript != nullptr) session->ledger().write_transcript(*transcript);
  }
  if (!report.error.empty()) report.correct = false;
  return report;
}

Interval wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double nt = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / nt;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nt;
  const double centre = (p + z2 / (2.0 * nt)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / nt + z2 / (4.0 * nt * nt)) / denom;
  return {std::max(0.0, std::min(p, centre - half)),
          std::min(1.0, std::max(p, centre + half))};
}

AggregateRow aggregate(const ExperimentConfig& config,
                       const std::vector<ExperimentReport>& reports) {
  AggregateRow row;
  row.algorithm = std::string(algorithm_name(config.algorithm));
  row.n = config.problem.instance.size();
  row.m = config.problem.m;
  row.agents = config.agents;
  row.delta = config.delta;
  row.trials = reports.size();
  try {
    row.horizon = resolve_horizon(config);
  } catch (const Error&) {
    row.horizon = 0;
  }
  long double rounds = 0.0L, time = 0.0L;
  for (const auto& r : reports) {
    row.successes += r.correct ? 1 : 0;
    row.errors += r.error.empty() ? 0 : 1;
    rounds += static_cast<long double>(r.rounds_used);
    time += static_cast<long double>(r.time_used);
    row.max_rounds = std::max(row.max_rounds, r.rounds_used);
    row.max_time = std::max(row.max_time, r.time_used);
  }
  if (!reports.empty()) {
    const auto cnt = static_cast<long double>(reports.size());
    row.success_rate = static_cast<double>(row.successes) /
                       static_cast<double>(reports.size());
    row.mean_rounds = static_cast<double>(rounds / cnt);
    row.mean_time = static_cast<double>(time / cnt);
  }
  row.wilson = wilson_interval(row.successes, row.trials);
  row.complexity = pivot_complexity(config.problem);
  row.speedup = row.mean_time > 0.0 ? row.complexity / row.mean_time : 0.0;
  return row;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentResult out;
  out.reports.resize(config.trials);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t t = next++; t < config.trials; t = next++) {
      out.reports[t] = run_trial(config, t);
    }
  };
  const std::size_t workers = std::min(config.workers, config.trials);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  out.row = aggregate(config, out.reports);
  return out;
}

void write_trials_csv(std::ostream& out, const ExperimentConfig& config,
                      const std::vector<ExperimentReport>& reports) {
  out << "trial,algo,n,m,K,T,rounds_used,time_used,correct,seed\n";
  const std::uint64_t t = resolve_horizon(config);
  for (const auto& r : reports) {
    out << r.trial << ',' << algorithm_name(config.algorithm) << ','
        << config.problem.instance.size() << ',' << config.problem.m << ','
        << config.agents << ',';
    if (t == kUnlimitedHorizon) {
      out << "inf";
    } else {
      out << t;
    }
    out << ',' << r.rounds_used << ',' << r.time_used << ','
        << (r.correct ? 1 : 0) << ',' << r.seed << '\n';
  }
}

void write_trials_json(std::ostream& out, const ExperimentConfig& config,
                       const std::vector<ExperimentReport>& reports) {
  const std::uint64_t t = resolve_horizon(config);
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    nlohmann::ordered_json j;
    j["trial"] = r.trial;
    j["algo"] = algorithm_name(config.algorithm);
    j["n"] = config.problem.instance.size();
    j["m"] = config.problem.m;
    j["K"] = config.agents;
    if (t == kUnlimitedHorizon) {
      j["T"] = "inf";
    } else {
      j["T"] = t;
    }
    j["rounds_used"] = r.rounds_used;
    j["time_used"] = r.time_used;
    j["correct"] = r.correct ? 1 : 0;
    j["seed"] = r.seed;
    arr.push_back(std::move(j));
  }
  out << arr.dump(1) << '\n';
}

const char* const kAggregateHeader =
    "hash,algo,n,m,K,T,delta,trials,successes,errors,success_rate,wilson_lo,"
    "wilson_hi,mean_rounds,max_rounds,mean_time,max_time,H,speedup";

std::string aggregate_csv_line(const AggregateRow& row, std::string_view hash) {
  std::ostringstream os;
  os << hash << ',' << row.algorithm << ',' << row.n << ',' << row.m << ','
     << row.agents << ',';
  if (row.horizon == kUnlimitedHorizon) {
    os << "inf";
  } else {
    os << row.horizon;
  }
  os << ',' << csv_double(row.delta) << ',' << row.trials << ','
     << row.successes << ',' << row.errors << ','
     << csv_double(row.success_rate) << ',' << csv_double(row.wilson.lo)
     << ',' << csv_double(row.wilson.hi) << ',' << csv_double(row.mean_rounds)
     << ',' << row.max_rounds << ',' << csv_double(row.mean_time) << ','
     << row.max_time << ',' << csv_double(row.complexity) << ','
     << csv_double(row.speedup);
  return os.str();
}

std::string aggregate_json(const AggregateRow& row) {
  nlohmann::ordered_json j;
  j["algo"] = row.algorithm;
  j["n"] = row.n;
  j["m"] = row.m;
  j["K"] = row.agents;
  if (row.horizon == kUnlimitedHorizon) {
    j["T"] = "inf";
  } else {
    j["T"] = row.horizon;
  }
  j["delta"] = row.delta;
  j["trials"] = row.trials;
  j["successes"] = row.successes;
  j["errors"] = row.errors;
  j["success_rate"] = row.success_rate;
  j["wilson_lo"] = row.wilson.lo;
  j["wilson_hi"] = row.wilson.hi;
  j["mean_rounds"] = row.mean_rounds;
  j["max_rounds"] = row.max_rounds;
  j["mean_time"] = row.mean_time;
  j["max_time"] = row.max_time;
  j["H"] = std::isfinite(row.complexity) ? nlohmann::ordered_json(row.complexity)
                                         : nlohmann::ordered_json(nullptr);
  j["speedup"] = row.speedup;
  return j.dump();
}

std::vector<ExperimentConfig> expand_grid(const SweepGrid& grid) {
  std::vector<ExperimentConfig> out;
  const bool multiplier = grid.base.mode == BudgetMode::kMultiplier;
  const bool absolute = grid.base.mode == BudgetMode::kAbsolute;
  const std::vector<double> lambdas =
      multiplier ? grid.lambdas : std::vector<double>{grid.base.lambda};
  const std::vector<std::size_t> exps =
      multiplier ? grid.exponents
                 : std::vector<std::size_t>{grid.base.exponent_rounds};
  const std::vector<std::uint64_t> horizons =
      absolute ? grid.horizons : std::vector<std::uint64_t>{grid.base.horizon};
  for (Algorithm a : grid.algorithms) {
    for (std::size_t k : grid.agents) {
      for (double l : lambdas) {
        for (std::size_t r : exps) {
          for (std::uint64_t t : horizons) {
            ExperimentConfig c = grid.base;
            c.algorithm = a;
            c.agents = k;
            c.lambda = l;
            c.exponent_rounds = r;
            c.horizon = t;
            c.mode = a == Algorithm::kFixedConf ? BudgetMode::kConfidence
                     : grid.base.mode == BudgetMode::kConfidence
                         ? BudgetMode::kFormula
                         : grid.base.mode;
            out.push_back(std::move(c));
          }
        }
      }
    }
  }
  return out;
}

std::string config_hash(const ExperimentConfig& c) {
  std::ostringstream key;
  key << std::setprecision(17) << algorithm_name(c.algorithm) << '|'
      << budget_mode_name(c.mode) << '|' << c.agents << '|' << c.horizon
      << '|' << c.lambda << '|' << c.exponent_rounds << '|' << c.delta << '|'
      << c.rounds << '|' << c.trials << '|' << c.seed << '|' << c.round_cap
      << '|' << c.problem.m;
  for (double x : c.problem.instance.means()) key << ',' << x;
  for (auto name : kConstantNames) key << '|' << constant_value(c.constants, name);
  // FNV-1a
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : key.str()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

// Drops a trailing partial line and returns the hashes already recorded.
std::set<std::string> load_existing(const std::string& path,
                                     bool& needs_header) {
  std::set<std::string> done;
  needs_header = true;
  namespace fs = std::filesystem;
  if (!fs::exists(path)) return done;
  std::string text;
  {
    std::ifstream in(path, std::ios::binary);
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  const auto last = text.rfind('\n');
  const std::size_t keep = last == std::string::npos ? 0 : last + 1;
  if (keep != text.size()) {
    fs::resize_file(path, keep);
    text.resize(keep);
  }
  std::istringstream lines(text);
  std::string line;
  bool first = true;
  while (std::getline(lines, line)) {
    if (first) {
      first = false;
      if (line == kAggregateHeader) {
        needs_header = false;
        continue;
      }
      throw InvalidParams("existing sweep file has a different header");
    }
    done.insert(line.substr(0, line.find(',')));
  }
  return done;
}

void append_line(const std::string& path, const std::string& line) {
  std::ofstream out(path, std::ios::app | std::ios::binary);
  out << line << '\n';
  out.flush();
  if (!out) throw Error("cannot append to " + path);
}

}  // namespace

SweepOutcome sweep(const SweepGrid& grid, const std::string& csv_path,
                   const std::string& json_path) {
  SweepOutcome outcome;
  bool needs_header = true;
  const std::set<std::string> done = load_existing(csv_path, needs_header);
  if (needs_header) append_line(csv_path, kAggregateHeader);
  for (const ExperimentConfig& c : expand_grid(grid)) {
    const std::string hash = config_hash(c);
    if (done.contains(hash)) {
      ++outcome.rows_skipped;
      continue;
    }
    const ExperimentResult res = run_experiment(c);
    if (!json_path.empty()) {
      nlohmann::ordered_json j = nlohmann::ordered_json::parse(aggregate_json(res.row));
      j["hash"] = hash;
      append_line(json_path, j.dump());
    }
    append_line(csv_path, aggregate_csv_line(res.row, hash));
    ++outcome.rows_run;
  }
  return outcome;
}

KeyValues parse_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw InvalidParams("line " + std::to_string(number) + ": expected key = value");
    }
    kv[trim(std::string_view(body).substr(0, eq))] =
        trim(std::string_view(body).substr(eq + 1));
  }
  return kv;
}

KeyValues read_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParams("cannot open " + path);
  return parse_key_values(in);
}

void apply_constant(Constants& c, std::string_view name, double value) {
  *constant_slot(c, name) = value;
}

double constant_value(const Constants& c, std::string_view name) {
  Constants copy = c;
  return *constant_slot(copy, name);
}

ExperimentConfig config_from_keys(const KeyValues& kv) {
  ExperimentConfig c;
  if (const auto it = kv.find("algo"); it != kv.end()) {
    const auto names = split_list(it->second);
    if (!names.empty()) c.algorithm = parse_algorithm(names.front());
  }
  c.problem = problem_from_keys(kv);
  c.agents = first_of<std::size_t>(kv, "K", 1);
  c.delta = get<double>(kv, "delta", c.delta);
  c.rounds = get<std::size_t>(kv, "rounds", 0);
  c.trials = get<std::size_t>(kv, "trials", 1);
  c.seed = get<std::uint64_t>(kv, "seed", 1);
  c.workers = get<std::size_t>(kv, "workers", 1);
  c.round_cap = get<std::size_t>(kv, "round_cap", 0);
  for (auto name : kConstantNames) {
    const std::string key(name);
    if (kv.contains(key)) apply_constant(c.constants, name, get<double>(kv, key, 0.0));
  }
  if (kv.contains("T")) {
    c.mode = BudgetMode::kAbsolute;
    const auto ts = get_list<std::uint64_t>(kv, "T");
    if (!ts.empty()) c.horizon = ts.front();
  } else if (kv.contains("lambda")) {
    c.mode = BudgetMode::kMultiplier;
    const auto ls = get_list<double>(kv, "lambda");
    if (!ls.empty()) c.lambda = ls.front();
    const auto rs = get_list<std::size_t>(kv, "R");
    if (!rs.empty()) c.exponent_rounds = rs.front();
  }
  if (kv.contains("budget")) c.mode = parse_budget_mode(kv.at("budget"));
  if (c.algorithm == Algorithm::kFixedConf) c.mode = BudgetMode::kConfidence;
  if (const char* env = std::getenv("BANDIT_SEED"); env != nullptr && *env) {
    c.seed = parse_number<std::uint64_t>("BANDIT_SEED", env);
  }
  return c;
}

SweepGrid grid_from_keys(const KeyValues& kv) {
  SweepGrid g;
  g.base = config_from_keys(kv);
  if (const auto it = kv.find("algo"); it != kv.end()) {
    for (const auto& s : split_list(it->second)) g.algorithms.push_back(parse_algorithm(s));
  }
  g.agents = kv.contains("K") ? get_list<std::size_t>(kv, "K")
                              : std::vector<std::size_t>{g.base.agents};
  g.lambdas = get_list<double>(kv, "lambda");
  g.exponents = kv.contains("R") ? get_list<std::size_t>(kv, "R")
                                 : std::vector<std::size_t>{1};
  g.horizons = get_list<std::uint64_t>(kv, "T");
  return g;
}

CalibrationResult calibrate(const ExperimentConfig& config,
                            std::string_view constant, double lo, double hi,
                            double target, std::size_t iterations) {
  if (!(lo > 0.0 && hi > lo)) throw InvalidParams("need 0 < lo < hi");
  CalibrationResult out;
  auto rate = [&](double value) {
    ExperimentConfig c = config;
    c.mode = BudgetMode::kFormula;
    apply_constant(c.constants, constant, value);
    const double r = run_experiment(c).row.success_rate;
    out.steps.push_back({value, r});
    return r;
  };
  if (rate(hi) < target) return out;
  out.value = hi;
  for (std::size_t i = 0; i < iterations; ++i) {
    const double mid = std::sqrt(lo * hi);
    if (rate(mid) >= target) {
      hi = mid;
      out.value = mid;
    } else {
      lo = mid;
    }
  }
  return out;
}

}  // namespace collabtopm
