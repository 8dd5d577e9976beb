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

#ifndef COLLABTOPM_RNG_HPP_
#define COLLABTOPM_RNG_HPP_

#include <cstdint>
#include <limits>

namespace collabtopm {

// Stream ids below 2^32 belong to agents.
inline constexpr std::uint64_t kCoordinatorStream = std::uint64_t{1} << 32;
inline constexpr std::uint64_t kPooledStream = kCoordinatorStream + 1;

std::uint64_t mix64(std::uint64_t x);

// Counter-based generator: output k of stream (seed, trial, stream) is a
// pure function of those four integers, so streams never interfere.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng() : CounterRng(0, 0, 0) {}
  CounterRng(std::uint64_t master_seed, std::uint64_t trial,
             std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() { return mix64(key_ + (++counter_) * kGamma); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t bound);

  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t counter() const { return counter_; }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Sum of `count` Bernoulli(mean) rewards. Means at or above 1/2 are drawn
// through the complement so flipped instances see complemented sums.
std::uint64_t draw_rewards(CounterRng& rng, std::uint64_t count, double mean);

}  // namespace collabtopm

#endif  // COLLABTOPM_RNG_HPP_
