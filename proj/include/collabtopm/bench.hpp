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

#ifndef COLLABTOPM_BENCH_HPP_
#define COLLABTOPM_BENCH_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "collabtopm/collab.hpp"
#include "collabtopm/constants.hpp"
#include "collabtopm/instance.hpp"

namespace collabtopm {

enum class Algorithm {
  kSimple,
  kCollab,
  kGeneral,
  kImproved,
  kReduce,
  kSelectMth,
  kFixedConf,
};

std::string_view algorithm_name(Algorithm a);
Algorithm parse_algorithm(std::string_view name);

enum class BudgetMode {
  kAbsolute,    // T given directly
  kMultiplier,  // T = lambda H / K^((R-1)/R)
  kFormula,     // the algorithm's calibrated budget formula
  kConfidence,  // fixed-confidence, delta only
};

std::string_view budget_mode_name(BudgetMode m);
BudgetMode parse_budget_mode(std::string_view name);

struct ExperimentConfig {
  Algorithm algorithm = Algorithm::kSimple;
  Problem problem{Instance({0.9, 0.1}), 1};
  std::size_t agents = 1;
  BudgetMode mode = BudgetMode::kFormula;
  std::uint64_t horizon = 0;  // kAbsolute
  double lambda = 1.0;        // kMultiplier
  std::size_t exponent_rounds = 1;  // R in the multiplier exponent
  double delta = 0.05;        // simple formula and fixed-confidence
  std::size_t rounds = 0;     // simple: R, 0 means ceil(log2 n)
  std::size_t trials = 1;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::size_t round_cap = 0;  // 0: derived from the algorithm
  Constants constants;

  void validate() const;
};

std::size_t simple_rounds(const ExperimentConfig& config);
// kUnlimitedHorizon for fixed-confidence runs.
std::uint64_t resolve_horizon(const ExperimentConfig& config);
std::size_t resolve_round_cap(const ExperimentConfig& config);

// Runs one trial; module errors are caught and recorded in the report.
ExperimentReport run_trial(const ExperimentConfig& config, std::uint64_t trial,
                           std::ostream* transcript = nullptr);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

Interval wilson_interval(std::size_t successes, std::size_t trials,
                         double z = 1.959963984540054);

struct AggregateRow {
  std::string algorithm;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t agents = 0;
  std::uint64_t horizon = 0;
  double delta = 0.0;
  std::size_t trials = 0;
  std::size_t successes = 0;
  std::size_t errors = 0;
  double success_rate = 0.0;
  Interval wilson;
  double mean_rounds = 0.0;
  std::size_t max_rounds = 0;
  double mean_time = 0.0;
  std::uint64_t max_time = 0;
  double complexity = 0.0;  // H<m>
  double speedup = 0.0;     // H<m> / mean time
};

AggregateRow aggregate(const ExperimentConfig& config,
                       const std::vector<ExperimentReport>& reports);

struct ExperimentResult {
  std::vector<ExperimentReport> reports;  // sorted by trial
  AggregateRow row;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

// Per-trial table: trial,algo,n,m,K,T,rounds_used,time_used,correct,seed
void write_trials_csv(std::ostream& out, const ExperimentConfig& config,
                      const std::vector<ExperimentReport>& reports);
void write_trials_json(std::ostream& out, const ExperimentConfig& config,
                       const std::vector<ExperimentReport>& reports);

extern const char* const kAggregateHeader;
std::string aggregate_csv_line(const AggregateRow& row, std::string_view hash);
std::string aggregate_json(const AggregateRow& row);

struct SweepGrid {
  ExperimentConfig base;
  std::vector<Algorithm> algorithms;
  std::vector<std::size_t> agents;
  std::vector<double> lambdas;         // kMultiplier axis
  std::vector<std::size_t> exponents;  // kMultiplier axis
  std::vector<std::uint64_t> horizons; // kAbsolute axis
};

std::vector<ExperimentConfig> expand_grid(const SweepGrid& grid);
std::string config_hash(const ExperimentConfig& config);

struct SweepOutcome {
  std::size_t rows_run = 0;
  std::size_t rows_skipped = 0;
};

// Appends one aggregate row per grid point to `csv_path`, skipping rows whose
// hash is already present. A truncated trailing line is dropped first.
SweepOutcome sweep(const SweepGrid& grid, const std::string& csv_path,
                   const std::string& json_path = {});

using KeyValues = std::map<std::string, std::string>;

// `key = value` lines; `#` starts a comment.
KeyValues parse_key_values(std::istream& in);
KeyValues read_key_values(const std::string& path);

// Builds a config from keys; BANDIT_SEED overrides `seed` when set.
ExperimentConfig config_from_keys(const KeyValues& kv);
SweepGrid grid_from_keys(const KeyValues& kv);
void apply_constant(Constants& c, std::string_view name, double value);
double constant_value(const Constants& c, std::string_view name);

struct CalibrationStep {
  double value = 0.0;
  double success_rate = 0.0;
};

struct CalibrationResult {
  std::optional<double> value;  // smallest passing value found
  std::vector<CalibrationStep> steps;
};

// Geometric bisection over one constant in [lo, hi] until the success rate in
// formula mode reaches `target`.
CalibrationResult calibrate(const ExperimentConfig& config,
                            std::string_view constant, double lo, double hi,
                            double target, std::size_t iterations);

}  // namespace collabtopm

#endif  // COLLABTOPM_BENCH_HPP_
