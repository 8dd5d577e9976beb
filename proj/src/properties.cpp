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

#include "collabtopm/properties.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "collabtopm/errors.hpp"

namespace collabtopm {

namespace {

constexpr double kTol = 1e-12;

bool leq(double a, double b) { return a <= b + kTol * std::max(1.0, std::fabs(b)); }

std::vector<double> random_means(CounterRng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = 0.01 + 0.98 * rng.uniform();
  return v;
}

void note(PropertyOutcome& out, const std::string& what) {
  ++out.violations;
  if (out.first_violation.empty()) out.first_violation = what;
}

}  // namespace

PropertyOutcome check_subset_sandwich(std::size_t cases, CounterRng& rng) {
  PropertyOutcome out{"subset-sandwich", 0, 0, {}};
  while (out.cases < cases) {
    const std::size_t n = 3 + rng.below(10);
    const std::vector<double> means = random_means(rng, n);
    std::vector<ArmId> v;
    for (ArmId i = 0; i < n; ++i) {
      if (rng.below(2) == 1) v.push_back(i);
    }
    if (v.size() < 2) continue;
    const std::size_t j = 1 + rng.below(n - 1);
    const double tj = order_stat(means, j);
    const std::vector<double> sub = restrict_means(means, v);
    const auto k = static_cast<std::size_t>(
        std::count_if(sub.begin(), sub.end(), [&](double x) { return x >= tj; }));
    if (k < 1 || k + 1 > sub.size()) continue;
    ++out.cases;
    const double eps = 0.01 + 0.5 * rng.uniform();
    const std::vector<double> gj = gaps(means, j);
    double mid = 0.0, mid_eps = 0.0;
    for (ArmId i : v) {
      mid += 1.0 / (gj[i] * gj[i]);
      const double e = std::max(gj[i], eps);
      mid_eps += 1.0 / (e * e);
    }
    const double low = complexity_h(sub, k);
    const double high = complexity_h(means, j);
    const double low_eps = complexity_h_trunc(sub, k, eps);
    const double high_eps = complexity_h_trunc(means, j, eps);
    if (!(leq(low, mid) && leq(mid, high) && leq(low_eps, mid_eps) &&
          leq(mid_eps, high_eps))) {
      std::ostringstream os;
      os << "n=" << n << " j=" << j << " k=" << k << " |V|=" << v.size();
      note(out, os.str());
    }
  }
  return out;
}

PropertyOutcome check_pivot_truncation(std::size_t cases, CounterRng& rng) {
  PropertyOutcome out{"pivot-truncation", 0, 0, {}};
  while (out.cases < cases) {
    const std::size_t n = 2 + rng.below(11);
    const std::vector<double> means = random_means(rng, n);
    const std::size_t m = 1 + rng.below(n - 1);
    const double hm = complexity_h(means, m);
    const std::vector<double> gm = gaps(means, m);
    const std::vector<ArmId> order = rank_order(means);
    for (std::size_t t = 1; t < n && out.cases < cases; ++t) {
      ++out.cases;
      const double eps = gm[order[t - 1]];
      const double ht = complexity_h_trunc(means, t, std::min(eps, 1.0));
      if (!leq(ht, 4.0 * hm)) {
        std::ostringstream os;
        os << "n=" << n << " m=" << m << " t=" << t;
        note(out, os.str());
      }
    }
  }
  return out;
}

PropertyOutcome check_far_arm(std::size_t cases, CounterRng& rng) {
  PropertyOutcome out{"far-arm", 0, 0, {}};
  while (out.cases < cases) {
    const std::size_t n = 2 + rng.below(11);
    const std::vector<double> means = random_means(rng, n);
    const std::size_t m = 1 + rng.below(n - 1);
    const double hm = complexity_h(means, m);
    const std::vector<double> gm = gaps(means, m);
    const std::vector<ArmId> order = rank_order(means);
    for (std::size_t t = 1; t <= n && out.cases < cases; ++t) {
      const std::size_t z = t < m ? m - t : t - m;
      if (z == 0) continue;
      ++out.cases;
      const double g = gm[order[t - 1]];
      if (!leq(1.0 / (g * g), hm / static_cast<double>(z))) {
        std::ostringstream os;
        os << "n=" << n << " m=" << m << " t=" << t;
        note(out, os.str());
      }
    }
  }
  return out;
}

namespace {

struct HardWalker {
  std::span<const double> all;
  HardCheck& out;

  void flag(std::size_t& counter, const std::string& what) {
    ++counter;
    if (out.first_violation.empty()) out.first_violation = what;
  }

  std::span<const double> slice(const HardAnnotation& a) const {
    return all.subspan(a.first, a.n);
  }

  // H of a level, or NaN when its pivot is degenerate.
  static double level_h(std::span<const double> means, std::size_t m) {
    try {
      return complexity_h(means, m);
    } catch (const DegeneratePivot&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  }

  void walk(const HardAnnotation& a) {
    if (a.n < 3) return;
    ++out.levels;
    const std::span<const double> means = slice(a);
    const std::size_t m = (a.n - 1) / 2;
    const double inv_c2 = 1.0 / (a.c * a.c);
    const double nd = static_cast<double>(a.n);
    const double h = level_h(means, m);
    double sub = 0.0;
    const std::string where = "n=" + std::to_string(a.n);
    if (!a.base) {
      ++out.recursive_levels;
      const auto eta = static_cast<long>(a.eta);
      const auto pivot_block = static_cast<std::size_t>(a.xi + eta);
      const HardAnnotation& blk = a.blocks[pivot_block];
      if (blk.n >= 3) sub = level_h(slice(blk), (blk.n - 1) / 2);

      // Median placement.
      const double median = order_stat(means, m + 1);
      const double blk_median = order_stat(slice(blk), (blk.n + 1) / 2);
      if (median != blk_median) flag(out.median_violations, where + " median");

      // Bands around mu and block ordering.
      const double quarter = std::pow(nd, -0.25);
      double previous_max = -std::numeric_limits<double>::infinity();
      bool band_ok = true;
      for (std::size_t b = 0; b < a.blocks.size(); ++b) {
        const auto& bk = a.blocks[b];
        const double offset = static_cast<double>(static_cast<long>(b) - eta) / 8.0;
        const double lo_band = a.mu + a.c * quarter * (offset - 0.01);
        const double hi_band = a.mu + a.c * quarter * (offset + 0.01);
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (double x : slice(bk)) {
          lo = std::min(lo, x);
          hi = std::max(hi, x);
          if (x < lo_band || x > hi_band || !(x > a.mu - a.c / 2.0) ||
              !(x < a.mu + a.c / 2.0)) {
            band_ok = false;
          }
        }
        if (!(lo > previous_max)) band_ok = false;
        previous_max = hi;
      }
      if (!band_ok) flag(out.band_violations, where + " bands");

      // Middle mass of the non-pivot blocks.
      const double upper = order_stat(means, m);
      const double lower = order_stat(means, m + 1);
      double mass = 0.0;
      for (std::size_t b = 0; b < a.blocks.size(); ++b) {
        if (b == pivot_block) continue;
        for (double x : slice(a.blocks[b])) {
          const double d = b < pivot_block ? x - upper : x - lower;
          mass += 1.0 / (d * d);
        }
      }
      if (!(mass <= 512.0 * inv_c2 * std::pow(nd, 0.75))) {
        flag(out.mass_violations, where + " middle mass");
      }
    }
    const double lo = inv_c2 * nd / 4.0;
    const double hi = 17.0 * inv_c2 * nd;
    const double rest = h - sub;
    if (!(rest >= lo * (1.0 - kTol) && rest <= hi * (1.0 + kTol))) {
      std::ostringstream os;
      os << where << " H-sub=" << rest << " outside [" << lo << ", " << hi
         << "]";
      flag(out.interval_violations, os.str());
    }
    for (const auto& b : a.blocks) walk(b);
  }
};

}  // namespace

HardCheck check_hard_instance(const HardInstance& hard) {
  HardCheck out;
  HardWalker w{hard.instance.means(), out};
  w.walk(hard.annotation);
  return out;
}

}  // namespace collabtopm
