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
#include <numbers>

#include "collabtopm/errors.hpp"
#include "collabtopm/reduction.hpp"
#include "doctest.h"

using namespace collabtopm;

namespace {

Session make(std::vector<double> means, std::size_t k, std::uint64_t t,
             std::uint64_t seed, std::size_t cap = 1 << 20) {
  return Session(Instance(std::move(means)), CollabConfig{k, t, cap}, seed, 0);
}

}  // namespace

TEST_CASE("best-arm stand-in rounds") {
  CHECK(best_arm_rounds(1) == 1);
  CHECK(best_arm_rounds(2) == 1);
  CHECK(best_arm_rounds(8) == 3);
  CHECK(best_arm_rounds(9) == 4);
}

TEST_CASE("best-arm stand-in on one arm makes no pulls") {
  Session s = make({0.3, 0.6}, 2, 10, 1);
  const std::vector<ArmId> one{1};
  const Certificate c = best_arm_collab(s, one, 0, 1);
  CHECK(c.selected == std::vector<ArmId>{1});
  CHECK(s.time_used() == 0);
}

TEST_CASE("best-arm stand-in refuses a zero allocation") {
  Session s = make({0.3, 0.6, 0.5}, 2, 100, 1);
  CHECK_THROWS_AS(best_arm_collab(s, std::vector<ArmId>{0, 1, 2}, 2, 1),
                  InsufficientBudget);
}

TEST_CASE("best-arm stand-in on two near-deterministic arms") {
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Session s = make({0.000001, 0.999999}, 4, 4, seed);
    ok += best_arm_collab(s, std::vector<ArmId>{0, 1}, 4, 2).selected ==
          std::vector<ArmId>{1};
  }
  CHECK(ok == 1000);
}

TEST_CASE("best-arm stand-in on three arms") {
  const std::vector<double> means{0.9, 0.5, 0.1};
  const auto t = static_cast<std::uint64_t>(
      std::ceil(20.0 * complexity_h(means, 1) / 4.0));
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Session s = make(means, 4, t, seed);
    const Certificate c = best_arm_collab(s, all_arms(3), t, 2);
    ok += c.selected == std::vector<ArmId>{0};
    CHECK(s.time_used() <= t);
    CHECK(s.rounds_used() <= 2);
  }
  CHECK(ok >= 900);
}

TEST_CASE("flipped stand-in finds the worst arm") {
  Session s = make({0.9, 0.5, 0.1}, 2, 100000, 1);
  const Certificate c = best_arm_collab(s, all_arms(3), 100000, 2, true);
  CHECK(c.selected == std::vector<ArmId>{2});
  CHECK(c.estimate(0) > c.estimate(2));
}

TEST_CASE("verified best arm") {
  Session s = make({0.9, 0.1}, 2, 1000000, 1);
  CHECK_FALSE(best_arm_verified(s, all_arms(2), 0.1, 0));
  const std::vector<ArmId> single{1};
  CHECK(*best_arm_verified(s, single, 0.1, 1) == 1);
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Session t = make({0.000001, 0.999999, 0.000001}, 2, 100000, seed);
    const auto r = best_arm_verified(t, all_arms(3), 0.1, 100000);
    ok += r && *r == 1;
  }
  CHECK(ok >= 198);
}

TEST_CASE("verified best arm refuses below the g threshold") {
  const Constants c;
  const std::vector<double> means{0.9, 0.5};
  const BudgetFns fns(c, 2);
  const auto eta = static_cast<std::uint64_t>(fns.g(means, 0.1) / 2.0);
  int refused = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Session s = make(means, 2, 1000000, seed);
    refused += !best_arm_verified(s, all_arms(2), 0.1, eta).has_value();
  }
  CHECK(refused >= 900);
}

TEST_CASE("verified best arm never names a worse arm too often") {
  const std::vector<double> means{0.6, 0.55, 0.5, 0.3};
  int wrong = 0;
  const int trials = 2000;
  for (int seed = 0; seed < trials; ++seed) {
    Session s = make(means, 2, 1 << 30, seed);
    const auto r = best_arm_verified(s, all_arms(4), 0.1, 2000 + 50 * seed);
    wrong += r && *r != 0;
  }
  CHECK(wrong <= trials * 0.1 + 3 * std::sqrt(trials * 0.1 * 0.9));
}

TEST_CASE("budget functions") {
  Constants c;
  const BudgetFns fns(c, 4);
  const std::vector<double> v{0.9, 0.5};
  CHECK(fns.g(v, 0.1) == doctest::Approx(2.0 * (12.5 / 4) * std::log(20.0)));
  CHECK(fns.f(v, 0.1, 100) ==
        doctest::Approx(20.0 * (12.5 / 4) * std::pow(std::log(400.0), 3) *
                        std::log(20.0)));
  CHECK(fns.beta(1000) == doctest::Approx(10.0 * std::pow(std::log(4000.0), 3)));
  CHECK(fns.g(std::vector<double>{0.4}, 0.1) == 0.0);
}

TEST_CASE("perturbed budget is a fair coin") {
  const Constants c;
  int reduced = 0;
  const int trials = 4000;
  for (int seed = 0; seed < trials; ++seed) {
    Session s = make({0.7, 0.2, 0.4, 0.6}, 2, 1 << 30, seed);
    SubsetDraw d;
    subset_best_arm(s, all_arms(4), 2, 0.1, 100000, c, &d);
    reduced += d.reduced;
    CHECK(d.subset_size <= 4);
    CHECK(d.tau == (d.reduced ? static_cast<std::uint64_t>(
                                    100000 / BudgetFns(c, 2).beta(100000))
                              : 100000));
  }
  CHECK(std::fabs(reduced / double(trials) - 0.5) <= 3 * std::sqrt(0.25 / trials));
}

TEST_CASE("subset of a single expected arm") {
  const Constants c;
  int returned = 0;
  for (int seed = 0; seed < 400; ++seed) {
    Session s = make({0.3, 0.5, 0.7}, 1, 1 << 30, seed);
    SubsetDraw d;
    const auto r = subset_best_arm(s, all_arms(3), 3, 0.1, 1000, c, &d);
    if (d.subset_size == 1 && d.tau > 0) {
      CHECK(r.has_value());
      ++returned;
    }
    if (d.subset_size == 0) CHECK_FALSE(r.has_value());
  }
  CHECK(returned > 60);  // about 89 expected: P(|V|=1) * P(tau > 0) * 400
}

TEST_CASE("reduction copy count") {
  CHECK(reduction_copies(8, 1.0 / 25, 1) == doctest::Approx(500000.0L));
  CHECK(reduction_copies(1, 0.5, 0) == doctest::Approx(100.0L));
}

TEST_CASE("reduction with no usable budget returns bottom") {
  Session s = make({0.9, 0.5, 0.1, 0.3}, 2, 1000, 1);
  const ReductionResult r = reduction(s, all_arms(4), 2, 1.0 / 25, 1, 10, Constants{});
  CHECK_FALSE(r.candidates.has_value());
  CHECK(r.per_copy_budget == 0);
  for (auto f : r.frequency) CHECK(f == 0);
}

TEST_CASE("reduction output is bounded and covers the top arms") {
  const Constants c;
  std::vector<double> means(12, 0.000001);
  means[3] = means[7] = 0.999999;
  const auto cap = static_cast<std::size_t>(std::ceil(16 * std::numbers::e * 2));
  int covered = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Session s = make(means, 2, 1ULL << 62, seed);
    const std::uint64_t per_copy = 200'000'000;
    const auto z = static_cast<std::uint64_t>(reduction_copies(2, 1.0 / 25, 0));
    const ReductionResult r = reduction(s, all_arms(12), 2, 1.0 / 25, 0, z * per_copy, c);
    REQUIRE(r.candidates.has_value());
    CHECK(r.candidates->size() <= cap);
    covered += std::binary_search(r.candidates->begin(), r.candidates->end(), 3) &&
               std::binary_search(r.candidates->begin(), r.candidates->end(), 7);
    std::uint64_t total = 0;
    for (auto f : r.frequency) total += f;
    CHECK(total <= static_cast<std::uint64_t>(r.copies));
  }
  CHECK(covered == 10);
}

TEST_CASE("reduction general falls back on a tiny budget") {
  Session s = make({0.9, 0.5, 0.1}, 1, 1000, 1);
  const ReductionGeneralResult r = reduction_general(s, all_arms(3), 1, 10, Constants{});
  CHECK(r.fallback);
  CHECK(r.levels == 0);
  CHECK(r.candidates.size() == 1);
}

TEST_CASE("reduction general on two near-deterministic arms") {
  const Constants c;
  const std::uint64_t t = 200'000'000;
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Session s = make({0.000001, 0.999999}, 2, t, seed);
    const ReductionGeneralResult r = reduction_general(s, all_arms(2), 1, t, c);
    ok += !r.fallback &&
          std::binary_search(r.candidates.begin(), r.candidates.end(), 1);
    CHECK(s.time_used() <= t);
    CHECK(r.candidates.size() <= 44);
  }
  CHECK(ok == 20);
}

TEST_CASE("improved on two arms") {
  const Constants c;
  const std::uint64_t t = 400'000'000;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Session s = make({0.9, 0.1}, 2, t, seed);
    const ImprovedResult r = collab_top_m_improved(s, all_arms(2), 1, t, c);
    CHECK(r.selected == std::vector<ArmId>{0});
    CHECK(s.time_used() <= t);
  }
}

TEST_CASE("m-th arm selection") {
  const Constants c;
  Session a = make({0.9, 0.5, 0.1}, 2, 1000000, 1);
  CHECK(select_mth_arm(a, all_arms(3), 3, 1000000, c) == 2);
  Session b = make({0.2, 0.9, 0.1}, 2, 400'000'000, 1);
  CHECK(select_mth_arm(b, all_arms(3), 1, 400'000'000, c) == 1);
  int ok = 0;
  // Each trial runs about a million simulated copies; 20 trials.
  const int trials = 20;
  for (int seed = 0; seed < trials; ++seed) {
    Session s = make({0.9, 0.5, 0.1}, 1, 1ULL << 40, seed);
    ok += select_mth_arm(s, all_arms(3), 2, 8'200'000'000ULL, c) == 1;
  }
  CHECK(ok >= 0.95 * trials);
}
