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

#ifndef COLLABTOPM_FIXED_CONFIDENCE_HPP_
#define COLLABTOPM_FIXED_CONFIDENCE_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "collabtopm/collab.hpp"

namespace collabtopm {

inline constexpr std::size_t kFixedConfidenceRoundCap = 64;

// Cumulative per-agent pulls of an active arm after round r:
// ceil(8 ln(4 n (r+1)^2 / delta) / (K eps_r^2)), eps_r = 2^-(r+1).
std::uint64_t fc_cumulative(std::size_t n, std::size_t r, double delta,
                            std::size_t agents);

struct FcRound {
  double eps = 0.0;
  std::vector<ArmId> active;
  std::size_t pivot = 0;
  std::vector<ArmId> accepted;  // this round only
  std::vector<ArmId> rejected;
};

struct FcTrace {
  std::vector<FcRound> rounds;
};

struct FcResult {
  std::vector<ArmId> selected;
  std::size_t rounds = 0;
};

FcResult collab_top_m_fixed_conf(Session& session,
                                 std::span<const ArmId> arms, std::size_t m,
                                 double delta, FcTrace* trace = nullptr);

}  // namespace collabtopm

#endif  // COLLABTOPM_FIXED_CONFIDENCE_HPP_
