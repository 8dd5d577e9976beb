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

#include <sstream>

#include "collabtopm/collab.hpp"
#include "collabtopm/errors.hpp"
#include "doctest.h"

using namespace collabtopm;

namespace {

Session make(std::vector<double> means, std::size_t k, std::uint64_t t,
             std::size_t cap = 10, std::uint64_t seed = 1) {
  return Session(Instance(std::move(means)), CollabConfig{k, t, cap}, seed, 0);
}

}  // namespace

TEST_CASE("config validation") {
  CHECK_THROWS_AS(CollabConfig({0, 1, 1}).validate(), InvalidParams);
  CHECK_THROWS_AS(CollabConfig({1, 0, 1}).validate(), InvalidParams);
  CHECK_THROWS_AS(CollabConfig({1, 1, 0}).validate(), InvalidParams);
  CHECK_NOTHROW(CollabConfig({1, 1, 1}).validate());
}

TEST_CASE("time is the sum of per-round maxima") {
  Session s = make({0.5, 0.5}, 3, 100);
  CHECK(s.time_used() == 0);
  Exchange ex(s, 100);
  ex.pull(0, 0, 5);
  ex.pull(1, 0, 3);
  ex.pull(2, 1, 7);
  ex.end_round();
  CHECK(s.time_used() == 7);
  ex.pull(0, 1, 4);
  ex.pull(1, 1, 2);
  ex.end_round();
  CHECK(s.time_used() == 11);
  CHECK(ex.time_used() == 11);
  CHECK(s.rounds_used() == 2);
  CHECK(s.ledger().agent_totals() == std::vector<std::uint64_t>{9, 5, 7});
}

TEST_CASE("zero-count pull leaves the ledger untouched") {
  Session s = make({0.5, 0.5}, 1, 10);
  Exchange ex(s, 10);
  CHECK(ex.pull(0, 0, 0) == 0);
  CHECK(s.ledger().arm_pulls(0) == 0);
  CHECK(ex.round_empty());
}

TEST_CASE("budgets are enforced before committing") {
  Session s = make({0.5, 0.5}, 2, 10);
  Exchange ex(s, 6);
  ex.pull(0, 0, 6);
  CHECK_THROWS_AS(ex.pull(0, 1, 1), BudgetExceeded);
  CHECK(s.ledger().arm_pulls(1) == 0);
  ex.pull(1, 1, 6);
  ex.end_round();
  CHECK_THROWS_AS(ex.pull_all(0, 1), BudgetExceeded);
  Exchange other(s, 100);
  other.pull(0, 0, 4);
  CHECK_THROWS_AS(other.pull(0, 0, 1), BudgetExceeded);  // horizon 10
  CHECK(s.time_used() <= 10);
}

TEST_CASE("round cap is enforced") {
  Session s = make({0.5, 0.5}, 1, 100, 2);
  Exchange ex(s, 100);
  ex.pull(0, 0, 1);
  ex.end_round();
  ex.pull(0, 0, 1);
  ex.end_round();
  ex.pull(0, 0, 1);
  CHECK_THROWS_AS(ex.end_round(), RoundCapExceeded);
}

TEST_CASE("merged view is the pooled weighted mean") {
  Session s = make({0.999999, 0.000001}, 4, 100);
  Exchange ex(s, 100);
  for (std::size_t a = 0; a < 4; ++a) ex.pull(a, 0, 1);
  const auto view = ex.end_round();
  REQUIRE(view.size() == 1);
  CHECK(view[0].pulls == 4);
  CHECK(view[0].mean == doctest::Approx(1.0));
  const ArmStat m = s.ledger().merged(0);
  CHECK(m.pulls == 4);
  CHECK(m.mean == view[0].mean);
}

TEST_CASE("single agent view equals its own stats") {
  Session s = make({0.3, 0.6}, 1, 1000);
  Exchange ex(s, 1000);
  const auto r = ex.pull(0, 1, 200);
  const auto view = ex.end_round();
  REQUIRE(view.size() == 1);
  CHECK(view[0].pulls == 200);
  CHECK(view[0].mean == doctest::Approx(static_cast<double>(r) / 200.0));
  CHECK(s.ledger().cell_individual_reward(0, 0, 1) == r);
}

TEST_CASE("spread deals pulls round-robin") {
  Session s = make({0.5, 0.5}, 3, 100);
  Exchange ex(s, 100);
  ex.pull_spread(0, 4);
  ex.pull_spread(1, 2);
  CHECK(s.ledger().cell_pulls(0, 0, 0) == 2);
  CHECK(s.ledger().cell_pulls(0, 1, 0) == 1);
  CHECK(s.ledger().cell_pulls(0, 2, 0) == 1);
  CHECK(s.ledger().cell_pulls(0, 1, 1) == 1);
  CHECK(s.ledger().cell_pulls(0, 2, 1) == 1);
  ex.end_round();
  CHECK(s.time_used() == 2);
}

TEST_CASE("conservation across cells") {
  Session s = make({0.4, 0.6, 0.2}, 3, 1000);
  Exchange ex(s, 1000);
  ex.pull(1, 2, 17);
  ex.pull_all(0, 5);
  ex.end_round();
  ex.pull_spread(2, 10);
  ex.pull(0, 2, 3);
  ex.end_round();
  const PullLedger& l = s.ledger();
  for (ArmId arm = 0; arm < 3; ++arm) {
    std::uint64_t total = 0;
    for (std::size_t r = 0; r < l.rounds(); ++r) {
      for (std::size_t a = 0; a < 3; ++a) total += l.cell_pulls(r, a, arm);
    }
    CHECK(total == l.arm_pulls(arm));
    if (total > 0) {
      CHECK(l.merged(arm).mean ==
            doctest::Approx(static_cast<double>(l.arm_reward(arm)) / total));
    }
  }
}

TEST_CASE("parallel copies add pulls and take the max of rounds") {
  Session s = make({0.5, 0.5}, 2, 100, 5);
  ParallelBlock block(s);
  block.next_copy();
  {
    Exchange ex(s, 50);
    ex.pull(0, 0, 3);
    ex.end_round();
    ex.pull(0, 0, 3);
    ex.end_round();
  }
  block.next_copy();
  {
    Exchange ex(s, 50);
    ex.pull(0, 1, 4);
    ex.end_round();
  }
  block.finish();
  CHECK(s.round() == 2);
  CHECK(s.rounds_used() == 2);
  CHECK(s.ledger().round_max(0) == 7);
  CHECK(s.time_used() == 10);
}

TEST_CASE("identical seeds give identical transcripts") {
  auto run = [](std::uint64_t seed) {
    Session s = make({0.2, 0.7, 0.4}, 2, 1000, 10, seed);
    Exchange ex(s, 1000);
    ex.pull(0, 1, 30);
    ex.pull_all(2, 11);
    ex.end_round();
    ex.pull_spread(0, 9);
    ex.end_round();
    std::ostringstream os;
    s.ledger().write_transcript(os);
    return os.str();
  };
  CHECK(run(3) == run(3));
  CHECK(run(3) != run(4));
  const std::string t = run(3);
  CHECK(t.find("\"round\"") != std::string::npos);
  CHECK(t.find("\"pulls\"") != std::string::npos);
}
