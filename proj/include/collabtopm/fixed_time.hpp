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

#ifndef COLLABTOPM_FIXED_TIME_HPP_
#define COLLABTOPM_FIXED_TIME_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "collabtopm/collab.hpp"
#include "collabtopm/constants.hpp"

namespace collabtopm {

// Candidate answer plus per-arm estimates. estimates[k] belongs to
// universe[k]; NaN marks an arm that was never estimated.
struct Certificate {
  std::vector<ArmId> selected;  // ascending
  std::vector<ArmId> universe;  // ascending
  std::vector<double> estimates;

  double estimate(ArmId arm) const;
};

// Phase schedule of the successive accept/reject algorithm.
struct SarSchedule {
  std::size_t rounds = 0;                   // R
  std::vector<std::uint64_t> cumulative;    // T_0 .. T_{R+1}
  std::vector<std::size_t> survivors;       // n_0 .. n_{R+1}
};

SarSchedule make_sar_schedule(std::size_t n, std::uint64_t budget,
                              std::size_t rounds);

struct SimplePhase {
  std::vector<ArmId> active;
  std::size_t pivot = 0;
  std::vector<ArmId> accepted;
  std::vector<ArmId> rejected;
};

struct SimpleTrace {
  std::vector<SimplePhase> phases;
};

// R + 1 phases of uniform sampling followed by accept/reject of the arms
// with the largest empirical gaps.
Certificate collab_top_m_simple(Session& session, std::span<const ArmId> arms,
                                std::size_t m, std::uint64_t budget,
                                std::size_t rounds,
                                SimpleTrace* trace = nullptr);

struct CollabLevel {
  std::size_t arms_before = 0;
  std::size_t pivot_before = 0;
  std::vector<ArmId> accepted;
  std::vector<ArmId> rejected;
};

struct CollabTrace {
  std::size_t round_bound = 0;
  std::vector<CollabLevel> levels;
  bool forced_simple = false;
  std::size_t simple_rounds = 0;
};

// Global round bound of the recursive algorithm for n arms and K agents.
std::size_t collab_round_bound(std::size_t n, std::size_t agents,
                               const Constants& c);
// Budget below which the recursive algorithm cannot even start.
std::uint64_t collab_min_budget(std::size_t n, std::size_t agents,
                                const Constants& c);

Certificate collab_top_m(Session& session, std::span<const ArmId> arms,
                         std::size_t m, std::uint64_t budget,
                         const Constants& c, CollabTrace* trace = nullptr);

// Returns the certified set, or nullopt.
std::optional<std::vector<ArmId>> verify_top_m(Session& session,
                                               std::span<const ArmId> arms,
                                               std::size_t m,
                                               const Certificate& cert,
                                               double gamma,
                                               std::uint64_t budget);

// Plurality set (ties: lexicographically smallest) and per-arm lower median
// of the non-NaN estimates. All inputs must share one universe.
Certificate aggregate_certificates(std::span<const Certificate> certs);

struct GeneralResult {
  std::vector<ArmId> selected;
  bool fallback = false;
  std::size_t best_level = 0;  // s*, 0 when nothing verified
  std::size_t levels = 0;      // number of s values tried
};

GeneralResult collab_top_m_general(Session& session,
                                   std::span<const ArmId> arms, std::size_t m,
                                   std::uint64_t budget, const Constants& c);

// 0, 1, ..., n-1
std::vector<ArmId> all_arms(std::size_t n);

}  // namespace collabtopm

#endif  // COLLABTOPM_FIXED_TIME_HPP_
