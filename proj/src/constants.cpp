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

#include "collabtopm/constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "collabtopm/errors.hpp"

namespace collabtopm {

namespace {

std::uint64_t to_budget(double t) {
  if (!(t >= 0.0) || t >= 1.8e19) {
    throw InvalidParams("budget formula out of range");
  }
  return static_cast<std::uint64_t>(std::ceil(t));
}

void check(double h, std::size_t n, std::size_t agents) {
  if (!(h > 0.0) || !std::isfinite(h) || n < 2 || agents < 1) {
    throw InvalidParams("budget formula needs H > 0, n >= 2, K >= 1");
  }
}

}  // namespace

std::uint64_t simple_budget(double h, std::size_t n, std::size_t agents,
                            double delta, const Constants& c) {
  check(h, n, agents);
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidParams("delta not in (0,1)");
  const double ln_n = std::log(static_cast<double>(n));
  const double k = static_cast<double>(agents);
  return to_budget(c.c2 * (h / k) * ln_n *
                   std::log(static_cast<double>(n) / delta));
}

std::uint64_t collab_budget(double h, std::size_t n, std::size_t agents,
                            const Constants& c) {
  check(h, n, agents);
  const double k = static_cast<double>(agents);
  const double ln_n = std::log(static_cast<double>(n));
  const double lnln = std::max(1.0, std::log(ln_n));
  return to_budget(c.c0 * (h / k) * (std::log(h * k) + ln_n * ln_n) * lnln);
}

std::uint64_t general_budget(double h, std::size_t n, std::size_t agents,
                             const Constants& c) {
  const std::uint64_t base = collab_budget(h, n, agents, c);
  return to_budget(c.general_multiplier * static_cast<double>(base));
}

std::uint64_t reduction_budget(double h, std::size_t n, std::size_t agents,
                               double delta, double gamma, const Constants& c) {
  check(h, n, agents);
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidParams("delta not in (0,1)");
  const double k = static_cast<double>(agents);
  const double scale = c.c_r * std::pow(4.0, gamma) * h /
                       (delta * delta * delta * k) *
                       std::log(static_cast<double>(n) / delta);
  double t = std::max(scale, 1.0);
  for (int it = 0; it < 200; ++it) {
    const double l = std::max(1.0, std::log(t * k));
    const double next = scale * std::pow(l, 6.0);
    if (!(next < 1.8e19)) throw InvalidParams("reduction budget overflows");
    if (std::fabs(next - t) <= 0.5) return to_budget(next);
    t = next;
  }
  return to_budget(t);
}

}  // namespace collabtopm
