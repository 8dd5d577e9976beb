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

// collabtopm command-line harness.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "collabtopm/bench.hpp"
#include "collabtopm/errors.hpp"
#include "collabtopm/instance_gen.hpp"
#include "collabtopm/properties.hpp"
#include "json.hpp"

namespace ct = collabtopm;

namespace {

ct::KeyValues load_keys(const std::string& path,
                        const std::vector<std::string>& overrides) {
  ct::KeyValues kv;
  if (!path.empty()) kv = ct::read_key_values(path);
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ct::InvalidParams("--set expects key=value");
    kv[o.substr(0, eq)] = o.substr(eq + 1);
  }
  return kv;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ct::InvalidParams("cannot write " + path);
  out << text;
}

int cmd_gen(const std::string& kind, std::size_t n, std::size_t m,
            double gap_min, double c, double mu, std::size_t k, double eps,
            std::uint64_t seed, const std::string& out) {
  ct::CounterRng rng(seed, 0, ct::kCoordinatorStream);
  if (kind == "hard") {
    ct::HardInstance hard = ct::gen_hard(c, mu, n, k, rng);
    write_file(out, ct::problem_to_json({hard.instance, hard.m}) + "\n");
    write_file(out + ".annotation.json", ct::annotation_to_json(hard.annotation) + "\n");
    return 0;
  }
  if (kind == "bias") {
    ct::BiasSpec spec;
    spec.n = n;
    spec.eps = eps;
    spec.mu = mu;
    ct::BiasInstance b = ct::gen_bias(spec, rng);
    write_file(out, ct::problem_to_json({b.instance, 1}) + "\n");
    nlohmann::ordered_json side;
    side["signs"] = b.signs;
    side["B"] = b.bias;
    side["plus"] = b.plus;
    write_file(out + ".bias.json", side.dump() + "\n");
    return 0;
  }
  ct::ClusterSpec spec;
  if (kind == "clustered") {
    spec.kind = ct::ClusterSpec::Kind::kClustered;
  } else if (kind != "uniform") {
    throw ct::InvalidParams("unknown kind: " + kind);
  }
  write_file(out, ct::problem_to_json({ct::gen_random(n, m, gap_min, spec, rng), m}) + "\n");
  return 0;
}

int cmd_run(const ct::KeyValues& kv, const std::string& csv,
            const std::string& json) {
  const ct::ExperimentConfig cfg = ct::config_from_keys(kv);
  const ct::ExperimentResult res = ct::run_experiment(cfg);
  if (!csv.empty()) {
    std::ofstream out(csv);
    ct::write_trials_csv(out, cfg, res.reports);
  }
  if (!json.empty()) {
    std::ofstream out(json);
    ct::write_trials_json(out, cfg, res.reports);
  }
  std::cout << ct::kAggregateHeader << '\n'
            << ct::aggregate_csv_line(res.row, ct::config_hash(cfg)) << '\n';
  return 0;
}

int cmd_sweep(const ct::KeyValues& kv, const std::string& csv,
              const std::string& json) {
  const ct::SweepOutcome o = ct::sweep(ct::grid_from_keys(kv), csv, json);
  std::cerr << "rows run: " << o.rows_run << ", skipped: " << o.rows_skipped
            << '\n';
  return 0;
}

int cmd_calibrate(const ct::KeyValues& kv, const std::string& constant,
                  double lo, double hi, double target, std::size_t iters) {
  const ct::CalibrationResult r =
      ct::calibrate(ct::config_from_keys(kv), constant, lo, hi, target, iters);
  for (const auto& s : r.steps) {
    std::cout << constant << '=' << s.value << " success=" << s.success_rate << '\n';
  }
  if (!r.value) {
    std::cout << "no passing value in range\n";
    return 1;
  }
  std::cout << "calibrated " << constant << " = " << *r.value << '\n';
  return 0;
}

int cmd_verify_props(std::size_t cases, std::uint64_t seed,
                     const std::vector<std::size_t>& hard_sizes, double c,
                     std::size_t k) {
  ct::CounterRng rng(seed, 0, 0);
  bool ok = true;
  for (const auto& o : {ct::check_subset_sandwich(cases, rng),
                        ct::check_pivot_truncation(cases, rng),
                        ct::check_far_arm(cases, rng)}) {
    std::cout << o.name << ": " << o.cases << " cases, " << o.violations
              << " violations";
    if (!o.ok()) std::cout << " (first: " << o.first_violation << ")";
    std::cout << '\n';
    ok = ok && o.ok();
  }
  for (std::size_t n : hard_sizes) {
    ct::CounterRng hr(seed, n, ct::kCoordinatorStream);
    const ct::HardInstance hard =
        ct::gen_hard(c, 0.5, n, k, hr, ct::HardValidation::kStructural);
    const ct::HardCheck h = ct::check_hard_instance(hard);
    std::cout << "hard n=" << n << ": levels=" << h.levels
              << " recursive=" << h.recursive_levels
              << " interval=" << h.interval_violations
              << " bands=" << h.band_violations
              << " mass=" << h.mass_violations
              << " median=" << h.median_violations;
    if (!h.ok()) std::cout << " (first: " << h.first_violation << ")";
    std::cout << '\n';
    ok = ok && h.ok();
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"collaborative top-m arm identification simulator"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "generate an instance file");
  std::string kind = "uniform", gen_out = "instance.json";
  std::size_t n = 64, m = 8, k = 2;
  double gap_min = 0.1, c = 0.1, mu = 0.5, eps = 0.05;
  std::uint64_t seed = 1;
  gen->add_option("--kind", kind, "uniform | clustered | hard | bias");
  gen->add_option("--n", n);
  gen->add_option("--m", m);
  gen->add_option("--gap-min", gap_min);
  gen->add_option("--C", c, "hard: top/bottom gap");
  gen->add_option("--mu", mu);
  gen->add_option("--K", k, "hard: agent count");
  gen->add_option("--eps", eps, "bias: arm offset");
  gen->add_option("--seed", seed);
  gen->add_option("-o,--out", gen_out);

  std::string config;
  std::vector<std::string> sets;
  std::string csv, json;
  auto* run = app.add_subcommand("run", "run one experiment");
  run->add_option("config", config, "key = value file");
  run->add_option("--set", sets, "override key=value");
  run->add_option("--csv", csv, "per-trial CSV");
  run->add_option("--json", json, "per-trial JSON");

  auto* sw = app.add_subcommand("sweep", "cross product of list-valued keys");
  sw->add_option("config", config)->required();
  sw->add_option("--set", sets);
  sw->add_option("--csv", csv, "aggregate CSV (appended, resumable)")->required();
  sw->add_option("--json", json, "aggregate JSON lines");

  auto* cal = app.add_subcommand("calibrate", "bisect a constant");
  std::string constant = "c2";
  double lo = 0.01, hi = 64.0, target = 0.9;
  std::size_t iters = 8;
  cal->add_option("config", config)->required();
  cal->add_option("--set", sets);
  cal->add_option("--constant", constant);
  cal->add_option("--lo", lo);
  cal->add_option("--hi", hi);
  cal->add_option("--target", target);
  cal->add_option("--iters", iters);

  auto* props = app.add_subcommand("verify-props", "run the property suites");
  std::size_t cases = 10000;
  std::vector<std::size_t> hard_sizes{3, 1025, 4097};
  std::size_t hard_k = 2;
  double hard_c = 0.1;
  props->add_option("--cases", cases);
  props->add_option("--seed", seed);
  props->add_option("--hard-n", hard_sizes);
  props->add_option("--hard-K", hard_k);
  props->add_option("--hard-C", hard_c);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*gen) return cmd_gen(kind, n, m, gap_min, c, mu, k, eps, seed, gen_out);
    if (*run) return cmd_run(load_keys(config, sets), csv, json);
    if (*sw) return cmd_sweep(load_keys(config, sets), csv, json);
    if (*cal) {
      return cmd_calibrate(load_keys(config, sets), constant, lo, hi, target, iters);
    }
    if (*props) return cmd_verify_props(cases, seed, hard_sizes, hard_c, hard_k);
  } catch (const ct::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
