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
#include <vector>

#include "collabtopm/errors.hpp"
#include "collabtopm/instance.hpp"
#include "collabtopm/rng.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace collabtopm;

namespace {
const std::vector<double> kThree{0.9, 0.5, 0.1};
}

TEST_CASE("instance rejects boundary means and single arms") {
  CHECK_THROWS_AS(Instance({0.5}), InvalidParams);
  CHECK_THROWS_AS(Instance({0.5, 1.0}), InvalidParams);
  CHECK_THROWS_AS(Instance({0.0, 0.5}), InvalidParams);
  CHECK_THROWS_AS(Instance({1.0 - 1e-13, 0.5}), InvalidParams);
  CHECK_NOTHROW(Instance({0.999999, 0.000001}));
}

TEST_CASE("gap values") {
  CHECK(gap(kThree, 0, 1) == doctest::Approx(0.4));
  CHECK(gap(kThree, 2, 1) == doctest::Approx(0.8));
  const std::vector<double> two{0.9, 0.1};
  CHECK(gap(two, 0, 1) == doctest::Approx(0.8));
  CHECK(gap(two, 1, 1) == doctest::Approx(0.8));
}

TEST_CASE("complexity values") {
  CHECK(complexity_h(kThree, 1) == doctest::Approx(14.0625));
  CHECK(complexity_h(std::vector<double>{0.9, 0.1}, 1) == doctest::Approx(3.125));
  CHECK(complexity_h(std::vector<double>{0.6, 0.6, 0.1}, 2) == doctest::Approx(12.0));
  CHECK_THROWS_AS(complexity_h(std::vector<double>{0.6, 0.6, 0.1}, 1),
                  DegeneratePivot);
  CHECK(complexity_h_trunc(std::vector<double>{0.9, 0.5}, 1, 0.5) ==
        doctest::Approx(8.0));
  CHECK(complexity_h_trunc(kThree, 1, 1.0) == doctest::Approx(3.0));
  CHECK(complexity_h_trunc(kThree, 1, 1e-9) ==
        doctest::Approx(complexity_h(kThree, 1)));
  CHECK(complexity_h_bar(kThree, 2) == doctest::Approx(12.5));
  CHECK(complexity_h_bar(std::vector<double>{0.9, 0.1}, 1) ==
        doctest::Approx(1.5625));
  CHECK_THROWS_AS(complexity_h_bar(std::vector<double>{0.5, 0.5, 0.1}, 1),
                  DegeneratePivot);
}

TEST_CASE("complexity matches the brute-force oracle") {
  CounterRng rng(11, 0, 0);
  for (int c = 0; c < 200; ++c) {
    const std::size_t n = 2 + rng.below(11);
    std::vector<double> means(n);
    for (double& x : means) x = 0.01 + 0.98 * rng.uniform();
    const std::size_t m = 1 + rng.below(n - 1);
    const double eps = 0.3 * rng.uniform() + 1e-3;
    CHECK(oracle::close(complexity_h(means, m), oracle::h(means, m)));
    CHECK(oracle::close(complexity_h_trunc(means, m, eps),
                        oracle::h_eps(means, m, eps)));
    CHECK(oracle::close(complexity_h_bar(means, m), oracle::h_bar(means, m)));
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(oracle::close(gap(means, i, m), oracle::gap(means, i, m)));
    }
  }
}

TEST_CASE("true top-m and rank order") {
  CHECK(true_top_m(kThree, 2) == std::vector<ArmId>{0, 1});
  CHECK(true_top_m(std::vector<double>{0.1, 0.9}, 1) == std::vector<ArmId>{1});
  const std::vector<double> v{0.3, 0.7, 0.2, 0.6};
  CHECK(true_top_m(v, 3) == std::vector<ArmId>{0, 1, 3});
  // ties broken by index
  CHECK(rank_order(std::vector<double>{0.5, 0.7, 0.5}) ==
        std::vector<ArmId>{1, 0, 2});
  CHECK(order_stat(v, 1) == 0.7);
  CHECK(order_stat(v, 4) == 0.2);
}

TEST_CASE("eps-top and eps-bottom") {
  const std::vector<ArmId> all{0, 1, 2};
  CHECK(is_eps_top(kThree, all, 1, 0.5, 1));
  CHECK_FALSE(is_eps_top(kThree, all, 2, 0.1, 1));
  CHECK(is_eps_top(kThree, all, 2, 1.0, 1));
  CHECK(is_eps_bottom(kThree, all, 2, 0.0, 1));
  CHECK_FALSE(is_eps_bottom(kThree, all, 0, 0.1, 1));
}

TEST_CASE("complexity report") {
  const ComplexityReport r = complexity_report(Instance(kThree), 1, 0.5);
  CHECK(r.h == doctest::Approx(14.0625));
  REQUIRE(r.h_eps.has_value());
  CHECK(*r.h_eps <= r.h);
  CHECK(r.gaps.size() == 3);
}

TEST_CASE("problem JSON round trip with fixed field order") {
  const Problem p{Instance({0.25, 0.75}), 1};
  const std::string text = problem_to_json(p);
  CHECK(text.find("\"means\"") < text.find("\"m\""));
  const Problem q = problem_from_json(text);
  CHECK(q.m == 1);
  CHECK(std::vector<double>(q.instance.means().begin(), q.instance.means().end()) ==
        std::vector<double>{0.25, 0.75});
  CHECK_THROWS(problem_from_json("{\"means\": [0.5]}"));
}

TEST_CASE("flipped instance") {
  const Instance f = Instance(kThree).flipped();
  CHECK(f.mean(0) == doctest::Approx(0.1));
  CHECK(f.mean(2) == doctest::Approx(0.9));
}
