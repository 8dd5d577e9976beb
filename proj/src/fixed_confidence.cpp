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

#include "collabtopm/fixed_confidence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "collabtopm/errors.hpp"

namespace collabtopm {

std::uint64_t fc_cumulative(std::size_t n, std::size_t r, double delta,
                            std::size_t agents) {
  const long double eps = std::ldexp(1.0L, -static_cast<int>(r + 1));
  const long double rr = static_cast<long double>(r + 1);
  const long double v =
      8.0L * std::log(4.0L * static_cast<long double>(n) * rr * rr / delta) /
      (static_cast<long double>(agents) * eps * eps);
  if (v > 1.8e19L) throw InvalidParams("fixed-confidence schedule overflows");
  return static_cast<std::uint64_t>(std::ceil(v));
}

FcResult collab_top_m_fixed_conf(Session& session,
                                 std::span<const ArmId> arms, std::size_t m,
                                 double delta, FcTrace* trace) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidParams("delta in (0,1)");
  std::vector<ArmId> active(arms.begin(), arms.end());
  std::sort(active.begin(), active.end());
  const std::size_t n = active.size();
  if (m > n) throw InvalidParams("m exceeds the number of arms");
  constexpr double kInf = std::numeric_limits<double>::infinity();

  const std::size_t k = session.agents();
  const std::size_t universe = session.instance().size();
  std::vector<std::uint64_t> pulls(universe, 0), sums(universe, 0);
  auto mean = [&](ArmId a) {
    return static_cast<double>(sums[a]) / static_cast<double>(pulls[a]);
  };
  Exchange ex(session, session.config().horizon);
  FcResult out;
  std::uint64_t previous = 0;
  for (std::size_t r = 0; !active.empty(); ++r) {
    const std::uint64_t target = fc_cumulative(n, r, delta, k);
    const std::uint64_t inc = target - previous;
    previous = target;
    for (ArmId a : active) {
      sums[a] += ex.pull_all(a, inc);
      pulls[a] += inc * k;
    }
    ex.end_round();
    ++out.rounds;

    std::vector<ArmId> order = active;
    std::stable_sort(order.begin(), order.end(),
                     [&](ArmId a, ArmId b) { return mean(a) > mean(b); });
    const std::size_t mr = m - out.selected.size();
    const double eps = std::ldexp(1.0, -static_cast<int>(r + 1));
    const double below = mr < order.size() ? mean(order[mr]) : -kInf;
    const double above = mr >= 1 ? mean(order[mr - 1]) : kInf;
    FcRound rec;
    if (trace) {
      rec.eps = eps;
      rec.active = active;
      rec.pivot = mr;
    }
    std::vector<ArmId> next;
    for (ArmId a : active) {
      const double v = mean(a);
      if (v > below + eps) {
        out.selected.push_back(a);
        if (trace) rec.accepted.push_back(a);
      } else if (v < above - eps) {
        if (trace) rec.rejected.push_back(a);
      } else {
        next.push_back(a);
      }
    }
    active = std::move(next);
    if (trace) trace->rounds.push_back(std::move(rec));
  }
  std::sort(out.selected.begin(), out.selected.end());
  return out;
}

}  // namespace collabtopm
