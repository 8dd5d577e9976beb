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

#ifndef COLLABTOPM_PROPERTIES_HPP_
#define COLLABTOPM_PROPERTIES_HPP_

#include <cstddef>
#include <string>

#include "collabtopm/instance_gen.hpp"
#include "collabtopm/rng.hpp"

namespace collabtopm {

struct PropertyOutcome {
  std::string name;
  std::size_t cases = 0;
  std::size_t violations = 0;
  std::string first_violation;

  bool ok() const { return violations == 0; }
};

// Sub-instance complexity is sandwiched between the subset complexity and
// the full complexity (plain and eps-truncated forms).
PropertyOutcome check_subset_sandwich(std::size_t cases, CounterRng& rng);
// Complexity at pivot t truncated at the t-th gap is at most 4 H<m>.
PropertyOutcome check_pivot_truncation(std::size_t cases, CounterRng& rng);
// An arm z ranks away from the pivot contributes at most H<m>/z.
PropertyOutcome check_far_arm(std::size_t cases, CounterRng& rng);

struct HardCheck {
  std::size_t levels = 0;
  std::size_t recursive_levels = 0;
  std::size_t interval_violations = 0;
  std::size_t band_violations = 0;
  std::size_t mass_violations = 0;
  std::size_t median_violations = 0;
  std::string first_violation;

  bool ok() const {
    return interval_violations + band_violations + mass_violations +
               median_violations ==
           0;
  }
};

// Complexity interval per level, block bands, middle mass and median
// placement, evaluated on every level of the annotation.
HardCheck check_hard_instance(const HardInstance& hard);

}  // namespace collabtopm

#endif  // COLLABTOPM_PROPERTIES_HPP_
