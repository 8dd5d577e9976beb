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

#ifndef COLLABTOPM_CONSTANTS_HPP_
#define COLLABTOPM_CONSTANTS_HPP_

#include <cstddef>
#include <cstdint>

namespace collabtopm {

// Universal constants. Defaults come from the calibrate subcommand.
struct Constants {
  double c0 = 16.0;  // collab budget formula
  double c1 = 8.0;   // centralized PAC budget
  double c2 = 8.0;   // simple budget formula
  double general_multiplier = 16.0;  // general budget = this * collab formula
  double c_f = 20.0;
  double c_g = 2.0;
  double c_a = 32.0;
  double c_r = 0.02;  // coverage collapses below ~5e-3 at n=512, m=8, K=8
  // Recursion stops once n <= K^partition_exponent.
  double partition_exponent = 10.0;
};

// ceil(c2 * (H/K) * ln n * ln(n/delta)).
std::uint64_t simple_budget(double h, std::size_t n, std::size_t agents,
                            double delta, const Constants& c);
// ceil(c0 * (H/K) * (ln(HK) + ln^2 n) * ln ln n), ln ln n floored at 1.
std::uint64_t collab_budget(double h, std::size_t n, std::size_t agents,
                            const Constants& c);
std::uint64_t general_budget(double h, std::size_t n, std::size_t agents,
                             const Constants& c);
// Smallest fixed point of T = c_r 4^gamma (H/(delta^3 K)) ln^6(TK) ln(n/delta).
std::uint64_t reduction_budget(double h, std::size_t n, std::size_t agents,
                               double delta, double gamma, const Constants& c);

}  // namespace collabtopm

#endif  // COLLABTOPM_CONSTANTS_HPP_
