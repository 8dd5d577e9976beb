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

#ifndef COLLABTOPM_CENTRAL_HPP_
#define COLLABTOPM_CENTRAL_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "collabtopm/collab.hpp"

namespace collabtopm {

// sqrt(ln(5 n t^4 / (4 delta)) / (2u))
double beta_radius(std::uint64_t u, std::uint64_t t, std::size_t n,
                   double delta);

class ArmSampler {
 public:
  virtual ~ArmSampler() = default;
  // Reward sum of `count` fresh pulls.
  virtual std::uint64_t pull(ArmId arm, std::uint64_t count) = 0;
};

// One agent's pulls through an exchange, capped at `cap` pulls in total.
class AgentSampler final : public ArmSampler {
 public:
  AgentSampler(Exchange& exchange, std::size_t agent, std::uint64_t cap)
      : exchange_(exchange), agent_(agent), cap_(cap) {}

  std::uint64_t pull(ArmId arm, std::uint64_t count) override;
  std::uint64_t used() const { return used_; }

 private:
  Exchange& exchange_;
  std::size_t agent_;
  std::uint64_t cap_;
  std::uint64_t used_ = 0;
};

struct CentralResult {
  std::vector<ArmId> selected;  // ascending ids
  std::vector<ArmStat> stats;   // aligned with the input arm list
  std::uint64_t pulls = 0;
  bool stopped = true;          // lucb: stopping rule fired
};

// Runs until the stopping rule fires or max_pulls is reached.
CentralResult lucb(ArmSampler& sampler, std::span<const ArmId> arms,
                   std::size_t m, double eps, double delta,
                   std::uint64_t max_pulls = 1'000'000'000);

// Fixed-budget variant: at most T pulls. Throws InsufficientBudget if T < n.
CentralResult central_approx_top(ArmSampler& sampler,
                                 std::span<const ArmId> arms, std::size_t m,
                                 std::uint64_t budget, double delta);
// Same on complemented rewards; returns the m apparent worst arms and
// un-complemented means.
CentralResult central_approx_btm(ArmSampler& sampler,
                                 std::span<const ArmId> arms, std::size_t m,
                                 std::uint64_t budget, double delta);

}  // namespace collabtopm

#endif  // COLLABTOPM_CENTRAL_HPP_
