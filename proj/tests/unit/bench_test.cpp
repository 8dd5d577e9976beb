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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "collabtopm/bench.hpp"
#include "collabtopm/errors.hpp"
#include "doctest.h"

using namespace collabtopm;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

ExperimentConfig small_config() {
  std::istringstream in(
      "algo = simple\n"
      "n = 16  # arms\n"
      "m = 4\n"
      "gap_min = 0.2\n"
      "K = 2\n"
      "trials = 6\n"
      "seed = 11\n");
  return config_from_keys(parse_key_values(in));
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "collabtopm_bench_test";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  fs::remove(p);
  return p;
}

}  // namespace

TEST_CASE("wilson interval") {
  for (std::size_t t : {1, 10, 200}) {
    for (std::size_t s = 0; s <= t; s += (t / 5 + 1)) {
      const Interval w = wilson_interval(s, t);
      const double p = static_cast<double>(s) / static_cast<double>(t);
      CHECK(w.lo <= p + 1e-12);
      CHECK(w.hi >= p - 1e-12);
      CHECK(w.lo >= 0.0);
      CHECK(w.hi <= 1.0);
    }
  }
  // 8/10 at 95%: textbook value
  const Interval w = wilson_interval(8, 10);
  CHECK(w.lo == doctest::Approx(0.4902).epsilon(1e-3));
  CHECK(w.hi == doctest::Approx(0.9433).epsilon(1e-3));
}

TEST_CASE("key value parsing") {
  const ExperimentConfig c = small_config();
  CHECK(c.algorithm == Algorithm::kSimple);
  CHECK(c.problem.instance.size() == 16);
  CHECK(c.problem.m == 4);
  CHECK(c.agents == 2);
  CHECK(c.trials == 6);
  CHECK(c.seed == 11);
  std::istringstream bad("algo = nope\n");
  CHECK_THROWS(config_from_keys(parse_key_values(bad)));
}

TEST_CASE("list-valued keys feed the grid") {
  std::istringstream in("algo = simple, collab\nn = 9\ngen = hard\nK = 2, 8\n");
  const KeyValues kv = parse_key_values(in);
  CHECK(config_from_keys(kv).agents == 2);
  const SweepGrid g = grid_from_keys(kv);
  CHECK(g.agents == std::vector<std::size_t>{2, 8});
  CHECK(expand_grid(g).size() == 4);
}

TEST_CASE("seed override from the environment") {
  ::setenv("BANDIT_SEED", "99", 1);
  const ExperimentConfig c = small_config();
  ::unsetenv("BANDIT_SEED");
  CHECK(c.seed == 99);
  CHECK(small_config().seed == 11);
}

TEST_CASE("trial CSV header and determinism") {
  const ExperimentConfig c = small_config();
  const ExperimentResult a = run_experiment(c);
  const ExperimentResult b = run_experiment(c);
  std::ostringstream sa, sb;
  write_trials_csv(sa, c, a.reports);
  write_trials_csv(sb, c, b.reports);
  CHECK(sa.str() == sb.str());
  const std::string golden = slurp(fs::path(GOLDEN_DIR) / "trials_header.csv");
  CHECK(sa.str().substr(0, golden.size()) == golden);
  CHECK(count_lines(sa.str()) == 7);
  CHECK(std::string(kAggregateHeader) + "\n" ==
        slurp(fs::path(GOLDEN_DIR) / "aggregate_header.csv"));
}

TEST_CASE("worker count does not change results") {
  ExperimentConfig c = small_config();
  const ExperimentResult one = run_experiment(c);
  c.workers = 3;
  const ExperimentResult three = run_experiment(c);
  REQUIRE(one.reports.size() == three.reports.size());
  for (std::size_t i = 0; i < one.reports.size(); ++i) {
    CHECK(one.reports[i].returned == three.reports[i].returned);
    CHECK(one.reports[i].time_used == three.reports[i].time_used);
  }
}

TEST_CASE("single trial success rate is 0 or 1") {
  ExperimentConfig c = small_config();
  c.trials = 1;
  const double r = run_experiment(c).row.success_rate;
  CHECK((r == 0.0 || r == 1.0));
}

TEST_CASE("simple time does not grow with K") {
  ExperimentConfig c = small_config();
  c.mode = BudgetMode::kAbsolute;
  c.horizon = 40000;
  c.trials = 4;
  double previous = 1e300;
  for (std::size_t k : {1, 2, 4, 8}) {
    c.agents = k;
    const AggregateRow row = run_experiment(c).row;
    CHECK(row.errors == 0);
    CHECK(row.mean_time <= previous);
    previous = row.mean_time;
  }
}

TEST_CASE("sweep grid, resume and truncated tail") {
  SweepGrid g;
  g.base = small_config();
  g.base.trials = 2;
  g.algorithms = {Algorithm::kSimple, Algorithm::kCollab};
  g.agents = {1, 2};
  CHECK(expand_grid(g).size() == 4);

  const fs::path csv = scratch("sweep.csv");
  const fs::path json = scratch("sweep.jsonl");
  SweepOutcome o = sweep(g, csv.string(), json.string());
  CHECK(o.rows_run == 4);
  const std::string first = slurp(csv);
  CHECK(count_lines(first) == 5);
  CHECK(count_lines(slurp(json)) == 4);

  o = sweep(g, csv.string(), json.string());
  CHECK(o.rows_run == 0);
  CHECK(o.rows_skipped == 4);
  CHECK(slurp(csv) == first);

  // chop the last row in half, as an interrupted write would
  const std::size_t cut = first.rfind('\n', first.size() - 2) + 10;
  {
    std::ofstream out(csv, std::ios::binary | std::ios::trunc);
    out << first.substr(0, cut);
  }
  o = sweep(g, csv.string());
  CHECK(o.rows_run == 1);
  CHECK(o.rows_skipped == 3);
  CHECK(slurp(csv) == first);
}

TEST_CASE("empty grid writes only the header") {
  SweepGrid g;
  g.base = small_config();
  CHECK(expand_grid(g).empty());
  const fs::path csv = scratch("empty.csv");
  const SweepOutcome o = sweep(g, csv.string());
  CHECK(o.rows_run == 0);
  CHECK(slurp(csv) == std::string(kAggregateHeader) + "\n");
}

TEST_CASE("config hash separates configurations") {
  ExperimentConfig a = small_config();
  ExperimentConfig b = a;
  CHECK(config_hash(a) == config_hash(b));
  b.agents = 3;
  CHECK(config_hash(a) != config_hash(b));
}
