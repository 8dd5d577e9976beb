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

#include <algorithm>
#include <cmath>

#include "collabtopm/errors.hpp"
#include "collabtopm/instance_gen.hpp"
#include "doctest.h"

using namespace collabtopm;

TEST_CASE("random instances honour the pivot gap") {
  CounterRng rng(1, 0, 0);
  const Instance two = gen_random(2, 1, 0.8, ClusterSpec{}, rng);
  CHECK(std::max(two.mean(0), two.mean(1)) - std::min(two.mean(0), two.mean(1)) >=
        0.8 - 1e-12);
  for (int c = 0; c < 50; ++c) {
    ClusterSpec spec;
    if (c % 2) spec.kind = ClusterSpec::Kind::kClustered;
    const Instance inst = gen_random(100, 10, 0.1, spec, rng);
    CHECK(gap(inst.means(), 0, 10) >= 0.0);
    CHECK(order_stat(inst.means(), 10) - order_stat(inst.means(), 11) >= 0.1 - 1e-12);
    CHECK(std::isfinite(complexity_h(inst.means(), 10)));
    for (double x : inst.means()) {
      CHECK(x >= 1e-6);
      CHECK(x <= 1 - 1e-6);
    }
  }
  CHECK_THROWS_AS(gen_random(10, 5, 1.0, ClusterSpec{}, rng), InfeasibleSpec);
  CHECK_THROWS_AS(gen_random(10, 10, 0.1, ClusterSpec{}, rng), InfeasibleSpec);
}

TEST_CASE("random instances are reproducible") {
  CounterRng a(9, 0, 0), b(9, 0, 0);
  const Instance x = gen_random(30, 4, 0.05, ClusterSpec{}, a);
  const Instance y = gen_random(30, 4, 0.05, ClusterSpec{}, b);
  CHECK(std::equal(x.means().begin(), x.means().end(), y.means().begin()));
}

TEST_CASE("hard base case") {
  CounterRng rng(1, 0, 0);
  const HardInstance h = gen_hard(0.1, 0.5, 5, 2, rng);
  const std::vector<double> want{0.55, 0.55, 0.5, 0.45, 0.45};
  REQUIRE(h.instance.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(h.instance.mean(i) == doctest::Approx(want[i]));
  CHECK(h.m == 2);
  CHECK(h.annotation.base);
}

TEST_CASE("hard parameters are validated") {
  CounterRng rng(1, 0, 0);
  CHECK_THROWS_AS(gen_hard(0.1, 0.5, 6, 2, rng), InvalidParams);
  CHECK_THROWS_AS(gen_hard(0.3, 0.5, 5, 2, rng), InvalidParams);
  CHECK_THROWS_AS(gen_hard(0.1, 0.3, 5, 2, rng), InvalidParams);
  CHECK_THROWS_AS(gen_hard(0.1, 0.7, 5, 2, rng), InvalidParams);
}

TEST_CASE("eta is the smallest odd integer above the fourth root") {
  CHECK(hard_eta(1025) == 7);   // 1025^(1/4) ~ 5.66
  CHECK(hard_eta(16) == 3);     // 2 exactly, next odd above is 3
  CHECK(hard_eta(10000) == 11); // 10 exactly
  CHECK(hard_eta(100001) == 19);
}

TEST_CASE("recursive structure") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CounterRng rng(seed, 0, 0);
    const HardInstance h =
        gen_hard(0.1, 0.5, 100001, 2, rng, HardValidation::kStructural);
    const HardAnnotation& a = h.annotation;
    REQUIRE_FALSE(a.base);
    CHECK(a.eta == 19);
    CHECK(a.blocks.size() == 39);
    CHECK(a.xi >= -19);
    CHECK(a.xi <= 19);
    std::size_t total = a.top + a.bottom;
    for (const auto& b : a.blocks) total += b.n;
    CHECK(total == 100001);
    if (a.xi == 0) CHECK(a.top == a.bottom);
    // blocks are disjoint at this size, so the overall median sits in
    // block xi + eta (0-based, lowest centre first)
    const auto& blk = a.blocks[static_cast<std::size_t>(a.xi + 19)];
    const std::vector<double> sub(h.instance.means().begin() + blk.first,
                                  h.instance.means().begin() + blk.first + blk.n);
    CHECK(order_stat(h.instance.means(), 50001) == order_stat(sub, (blk.n + 1) / 2));
  }
}

TEST_CASE("strict validation rejects overlapping recursive levels") {
  CounterRng rng(1, 0, 0);
  CHECK_THROWS_AS(gen_hard(0.1, 0.5, 1025, 2, rng), InvalidParams);
}

TEST_CASE("annotation JSON") {
  CounterRng rng(2, 0, 0);
  const HardInstance h = gen_hard(0.1, 0.5, 1025, 2, rng, HardValidation::kStructural);
  const std::string j = annotation_to_json(h.annotation);
  CHECK(j.find("\"xi\"") != std::string::npos);
  CHECK(j.find("\"blocks\"") != std::string::npos);
}

TEST_CASE("bias instances") {
  CounterRng a(3, 0, 0), b(3, 0, 0);
  BiasSpec spec{4, 0.1, 0.5, true, {}};
  const BiasInstance x = gen_bias(spec, a);
  const BiasInstance y = gen_bias(spec, b);
  CHECK(x.signs == y.signs);
  long sum = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(x.instance.mean(i) == doctest::Approx(0.5 + 0.1 * x.signs[i]));
    sum += x.signs[i];
  }
  CHECK(sum == x.bias);
  CHECK(std::isnan(x.q));

  CounterRng c(4, 0, 0);
  const BiasInstance all = gen_bias(BiasSpec{6, 0.05, 0.5, false, {6}}, c);
  CHECK(all.bias == 6);
  CHECK(all.plus == 6);
  CHECK(all.q == doctest::Approx(1.0 / 64));

  CounterRng d(5, 0, 0);
  for (int t = 0; t < 20; ++t) {
    const BiasInstance v = gen_bias(BiasSpec{10, 0.05, 0.5, false, {3, 7}}, d);
    CHECK((v.plus == 3 || v.plus == 7));
  }
  CHECK_THROWS_AS(gen_bias(BiasSpec{4, 0.2, 0.5, true, {}}, d), InvalidParams);
}
