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

#include <cmath>

#include "collabtopm/errors.hpp"
#include "collabtopm/fixed_confidence.hpp"
#include "collabtopm/fixed_time.hpp"
#include "doctest.h"

using namespace collabtopm;

namespace {

Session make(std::vector<double> means, std::size_t k, std::uint64_t seed) {
  return Session(Instance(std::move(means)),
                 CollabConfig{k, kUnlimitedHorizon, kFixedConfidenceRoundCap},
                 seed, 0);
}

}  // namespace

TEST_CASE("cumulative schedule") {
  for (std::size_t r = 0; r < 10; ++r) {
    const double eps = std::ldexp(1.0, -static_cast<int>(r + 1));
    const double want = std::ceil(
        8.0 * std::log(4.0 * 10 * (r + 1) * (r + 1) / 0.05) / (3 * eps * eps));
    CHECK(fc_cumulative(10, r, 0.05, 3) == static_cast<std::uint64_t>(want));
    if (r > 0) CHECK(fc_cumulative(10, r, 0.05, 3) > fc_cumulative(10, r - 1, 0.05, 3));
  }
}

TEST_CASE("near-deterministic arms are always solved") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Session s = make({0.000001, 0.999999, 0.999999, 0.000001, 0.000001}, 2, seed);
    const FcResult r = collab_top_m_fixed_conf(s, all_arms(5), 2, 0.05);
    CHECK(r.selected == std::vector<ArmId>{1, 2});
    CHECK(r.rounds == 1);
  }
}

TEST_CASE("two arms at gap 0.2") {
  const int trials = 10000;
  int ok = 0;
  std::size_t worst = 0;
  for (int seed = 0; seed < trials; ++seed) {
    Session s = make({0.6, 0.4}, 1, seed);
    const FcResult r = collab_top_m_fixed_conf(s, all_arms(2), 1, 0.05);
    const bool good = r.selected == std::vector<ArmId>{0};
    ok += good;
    if (good) worst = std::max(worst, s.rounds_used());
  }
  CHECK(ok >= 0.95 * trials);
  CHECK(worst <= 5);
}

TEST_CASE("per-round bookkeeping") {
  const std::vector<double> means{0.9, 0.8, 0.45, 0.4, 0.1, 0.05};
  const std::vector<ArmId> truth = true_top_m(means, 3);
  const std::vector<double> g = gaps(means, 3);
  int clean = 0;
  const int trials = 500;
  for (int seed = 0; seed < trials; ++seed) {
    Session s = make(means, 3, seed);
    FcTrace trace;
    const FcResult r = collab_top_m_fixed_conf(s, all_arms(6), 3, 0.05, &trace);
    bool ok = r.selected == truth;
    std::size_t accepted = 0;
    for (const FcRound& round : trace.rounds) {
      std::size_t top_active = 0;
      for (ArmId a : round.active) {
        top_active += std::binary_search(truth.begin(), truth.end(), a);
      }
      ok = ok && round.pivot == top_active && round.pivot == 3 - accepted;
      for (ArmId a : round.accepted) {
        ok = ok && std::binary_search(truth.begin(), truth.end(), a);
      }
      for (ArmId a : round.rejected) {
        ok = ok && !std::binary_search(truth.begin(), truth.end(), a);
      }
      accepted += round.accepted.size();
    }
    // An arm with gap >= 4 eps_r is gone after round r.
    for (std::size_t i = 0; i + 1 < trace.rounds.size(); ++i) {
      for (ArmId a : trace.rounds[i + 1].active) {
        ok = ok && g[a] < 4.0 * trace.rounds[i].eps;
      }
    }
    clean += ok;
    if (trace.rounds.back().pivot == 0) {
      CHECK(trace.rounds.back().accepted.empty());
    }
  }
  CHECK(clean >= 0.95 * trials);
}

TEST_CASE("round cap stops degenerate inputs") {
  Session s(Instance({0.5, 0.5}), CollabConfig{1, kUnlimitedHorizon, 3}, 1, 0);
  CHECK_THROWS_AS(collab_top_m_fixed_conf(s, all_arms(2), 1, 0.05), RoundCapExceeded);
}
