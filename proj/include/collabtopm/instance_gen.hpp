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

#ifndef COLLABTOPM_INSTANCE_GEN_HPP_
#define COLLABTOPM_INSTANCE_GEN_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "collabtopm/instance.hpp"
#include "collabtopm/rng.hpp"

namespace collabtopm {

struct ClusterSpec {
  enum class Kind { kUniform, kClustered };
  Kind kind = Kind::kUniform;
  double lo = 0.05;
  double hi = 0.95;
  std::size_t clusters = 4;  // kClustered: centres uniform in [lo, hi]
  double spread = 0.02;      // kClustered: half-width around each centre
};

// Means drawn per spec, then the two sides of the pivot pushed apart until
// theta_[m] - theta_[m+1] >= gap_min. Throws InfeasibleSpec if impossible.
Instance gen_random(std::size_t n, std::size_t m, double gap_min,
                    const ClusterSpec& spec, CounterRng& rng);

enum class HardValidation {
  kStrict,      // also reject levels whose blocks overlap or leave their band
  kStructural,  // ranges and counts only
};

// One level of the recursive hard distribution. Arms of a level are laid out
// as [top arms | block 1 | ... | block 2eta+1 | bottom arms], or
// [top | median | bottom] for a base level.
struct HardAnnotation {
  std::size_t first = 0;  // offset of the level's arms in the instance
  std::size_t n = 0;
  double c = 0.0;
  double mu = 0.0;
  bool base = true;
  std::size_t eta = 0;
  long xi = 0;
  std::size_t top = 0;
  std::size_t bottom = 0;
  std::vector<HardAnnotation> blocks;
};

struct HardInstance {
  Instance instance;
  std::size_t m;
  HardAnnotation annotation;
};

// Smallest odd integer strictly greater than n^{1/4}.
std::size_t hard_eta(std::size_t n);

HardInstance gen_hard(double c, double mu, std::size_t n, std::size_t agents,
                      CounterRng& rng,
                      HardValidation validation = HardValidation::kStrict,
                      double partition_exponent = 10.0);

std::string annotation_to_json(const HardAnnotation& a);

struct BiasSpec {
  std::size_t n = 0;
  double eps = 0.0;
  double mu = 0.5;
  bool uniform = true;               // false: exact +1 count drawn from allowed
  std::vector<std::size_t> allowed;  // S
};

struct BiasInstance {
  Instance instance;
  std::vector<int> signs;  // b_i
  long bias = 0;           // B = sum b_i
  std::size_t plus = 0;
  double q = 0.0;  // min over S of 2^-n binom(n, s); uniform mode: NaN
};

BiasInstance gen_bias(const BiasSpec& spec, CounterRng& rng);

}  // namespace collabtopm

#endif  // COLLABTOPM_INSTANCE_GEN_HPP_
