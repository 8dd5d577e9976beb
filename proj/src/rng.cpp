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

#include "collabtopm/rng.hpp"

#include <boost/random/binomial_distribution.hpp>

namespace collabtopm {

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

CounterRng::CounterRng(std::uint64_t master_seed, std::uint64_t trial,
                       std::uint64_t stream)
    : key_(mix64(mix64(mix64(master_seed + kGamma) ^ trial) + stream * kGamma)) {}

std::uint64_t CounterRng::below(std::uint64_t bound) {
  // Lemire's multiply-shift with rejection.
  std::uint64_t x = (*this)();
  __uint128_t m = static_cast<__uint128_t>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = -bound % bound;
    while (low < threshold) {
      x = (*this)();
      m = static_cast<__uint128_t>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

namespace {

std::uint64_t binomial(CounterRng& rng, std::uint64_t count, double p) {
  if (!(p > 0.0)) return 0;
  if (!(p < 1.0)) return count;
  if (count == 1) return rng.uniform() < p ? 1 : 0;
  boost::random::binomial_distribution<std::int64_t, double> dist(
      static_cast<std::int64_t>(count), p);
  return static_cast<std::uint64_t>(dist(rng));
}

}  // namespace

std::uint64_t draw_rewards(CounterRng& rng, std::uint64_t count, double mean) {
  if (count == 0) return 0;
  // 1 - (1 - mean) rather than mean: the flipped instance stores 1 - mean,
  // and both sides must hand the sampler the same double.
  if (mean < 0.5) return binomial(rng, count, 1.0 - (1.0 - mean));
  return count - binomial(rng, count, 1.0 - mean);
}

}  // namespace collabtopm
