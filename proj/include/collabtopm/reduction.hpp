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

#ifndef COLLABTOPM_REDUCTION_HPP_
#define COLLABTOPM_REDUCTION_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "collabtopm/collab.hpp"
#include "collabtopm/constants.hpp"
#include "collabtopm/fixed_time.hpp"

namespace collabtopm {

// Budget thresholds for the verified best-arm routine.
class BudgetFns {
 public:
  BudgetFns(const Constants& c, std::size_t agents)
      : c_f_(c.c_f), c_g_(c.c_g), agents_(agents) {}

  // C_f (H<1>(V)/K) ln^3(eta K) ln(|V|/delta)
  double f(std::span<const double> subset_means, double delta,
           double eta) const;
  // C_g (H<1>(V)/K) ln(|V|/delta)
  double g(std::span<const double> subset_means, double delta) const;
  // (C_f/C_g) ln^3(T K)
  double beta(std::uint64_t budget) const;
  // f evaluated once at eta = eta0, standing in for the solution of
  // eta = f(V, delta, eta).
  double fixed_point(std::span<const double> subset_means, double delta,
                     double eta0) const;

 private:
  double c_f_;
  double c_g_;
  std::size_t agents_;
};

// Rounds used by the best-arm stand-in for K agents.
std::size_t best_arm_rounds(std::size_t agents);

// Collaborative successive halving over `rounds` rounds; with `flipped` it
// looks for the worst arm instead. Certificate over pivot 1.
Certificate best_arm_collab(Session& session, std::span<const ArmId> arms,
                            std::uint64_t budget, std::size_t rounds,
                            bool flipped = false);

// Best-arm stand-in on half the budget, then verification on the other half.
std::optional<ArmId> best_arm_verified(Session& session,
                                       std::span<const ArmId> arms,
                                       double delta, std::uint64_t budget);

struct SubsetDraw {
  std::size_t subset_size = 0;
  bool reduced = false;  // tau = T / beta
  std::uint64_t tau = 0;
};

std::optional<ArmId> subset_best_arm(Session& session,
                                     std::span<const ArmId> arms,
                                     std::size_t m, double delta,
                                     std::uint64_t budget, const Constants& c,
                                     SubsetDraw* draw = nullptr);

struct ReductionResult {
  std::optional<std::vector<ArmId>> candidates;
  std::vector<ArmId> universe;          // ascending
  std::vector<std::uint64_t> frequency; // aligned with universe
  long double copies = 0;               // z
  std::uint64_t per_copy_budget = 0;
  // Copies whose answer is bottom whatever the samples (subset too large to
  // verify with its budget) are counted but not run.
  std::uint64_t simulated = 0;
  bool aggregated = false;  // simulated < copies
  bool bounded = false;     // bottom decided before running any copy
};

// Number of copies z = ceil(25 m 4^gamma / delta^2), as a real.
long double reduction_copies(std::size_t m, double delta, double gamma);

ReductionResult reduction(Session& session, std::span<const ArmId> arms,
                          std::size_t m, double delta, double gamma,
                          std::uint64_t budget, const Constants& c);

struct ReductionGeneralResult {
  std::vector<ArmId> candidates;
  bool fallback = false;
  std::size_t best_level = 0;
  std::size_t levels = 0;
};

ReductionGeneralResult reduction_general(Session& session,
                                         std::span<const ArmId> arms,
                                         std::size_t m, std::uint64_t budget,
                                         const Constants& c);

struct ImprovedResult {
  std::vector<ArmId> selected;
  std::vector<ArmId> candidates;
  bool reduction_fallback = false;
  bool fallback = false;
};

ImprovedResult collab_top_m_improved(Session& session,
                                     std::span<const ArmId> arms,
                                     std::size_t m, std::uint64_t budget,
                                     const Constants& c);

// Arm holding the m-th largest mean.
ArmId select_mth_arm(Session& session, std::span<const ArmId> arms,
                     std::size_t m, std::uint64_t budget, const Constants& c);

}  // namespace collabtopm

#endif  // COLLABTOPM_REDUCTION_HPP_
