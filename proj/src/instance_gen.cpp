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

#include "collabtopm/instance_gen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "collabtopm/errors.hpp"
#include "json.hpp"

namespace collabtopm {

namespace {

constexpr double kLow = 1e-6;
constexpr double kHigh = 1.0 - 1e-6;

double uniform_in(CounterRng& rng, double lo, double hi) {
  return lo + (hi - lo) * rng.uniform();
}

}  // namespace

Instance gen_random(std::size_t n, std::size_t m, double gap_min,
                    const ClusterSpec& spec, CounterRng& rng) {
  if (n < 2 || m < 1 || m >= n) throw InfeasibleSpec("need 1 <= m <= n-1");
  if (!(gap_min >= 0.0) || gap_min >= kHigh - kLow) {
    throw InfeasibleSpec("pivot gap cannot fit inside (0,1)");
  }
  if (!(spec.lo < spec.hi)) throw InfeasibleSpec("empty mean range");
  std::vector<double> means(n);
  if (spec.kind == ClusterSpec::Kind::kUniform) {
    for (double& v : means) v = uniform_in(rng, spec.lo, spec.hi);
  } else {
    if (spec.clusters == 0) throw InfeasibleSpec("no clusters");
    std::vector<double> centres(spec.clusters);
    for (double& c : centres) c = uniform_in(rng, spec.lo, spec.hi);
    for (double& v : means) {
      const double c = centres[rng.below(spec.clusters)];
      v = uniform_in(rng, c - spec.spread, c + spec.spread);
    }
  }
  for (double& v : means) v = std::clamp(v, kLow, kHigh);

  const std::vector<ArmId> order = rank_order(means);
  const double upper = means[order[m - 1]];
  const double lower = means[order[m]];
  const double need = gap_min - (upper - lower);
  if (need > 0.0) {
    double up = need / 2.0;
    double down = need / 2.0;
    if (upper + up > kHigh) {
      up = kHigh - upper;
      down = need - up;
    }
    if (lower - down < kLow) {
      down = lower - kLow;
      up = need - down;
    }
    if (upper + up > kHigh + 1e-15) throw InfeasibleSpec("gap too large");
    for (std::size_t r = 0; r < n; ++r) {
      double& v = means[order[r]];
      v = std::clamp(r < m ? v + up : v - down, kLow, kHigh);
    }
  }
  const double gap = means[order[m - 1]] - means[order[m]];
  if (!(gap > 0.0) || gap < gap_min - 1e-12) {
    throw InfeasibleSpec("could not separate the pivot");
  }
  return Instance(std::move(means));
}

std::size_t hard_eta(std::size_t n) {
  auto fourth = [](std::size_t r) {
    return static_cast<unsigned __int128>(r) * r * r * r;
  };
  auto r = static_cast<std::size_t>(std::pow(static_cast<double>(n), 0.25));
  while (r > 0 && fourth(r) > n) --r;
  while (fourth(r + 1) <= n) ++r;
  std::size_t eta = r + 1;
  if (eta % 2 == 0) ++eta;
  return eta;
}

namespace {

struct HardBuilder {
  CounterRng& rng;
  HardValidation validation;
  double threshold;
  std::vector<double> means;

  HardAnnotation build(double c, double mu, std::size_t n) {
    if (n % 2 == 0) throw InvalidParams("hard instance needs odd n");
    if (!(c > 0.0 && c < 0.25)) throw InvalidParams("C must lie in (0,1/4)");
    if (!(mu > 0.375 && mu < 0.625)) {
      throw InvalidParams("mu must lie in (3/8,5/8)");
    }
    HardAnnotation a;
    a.first = means.size();
    a.n = n;
    a.c = c;
    a.mu = mu;
    if (static_cast<double>(n) <= threshold) {
      a.base = true;
      a.top = a.bottom = (n - 1) / 2;
      means.insert(means.end(), a.top, mu + c / 2.0);
      means.push_back(mu);
      means.insert(means.end(), a.bottom, mu - c / 2.0);
      return a;
    }
    a.base = false;
    a.eta = hard_eta(n);
    const std::size_t middle = a.eta * (2 * a.eta + 1);
    if (middle > n || (n - middle) / 2 < a.eta * a.eta) {
      throw InvalidParams("too few arms for the block layout");
    }
    const std::size_t half = (n - middle) / 2;
    const auto eta = static_cast<long>(a.eta);
    a.xi = static_cast<long>(rng.below(2 * a.eta + 1)) - eta;
    a.top = static_cast<std::size_t>(static_cast<long>(half) + a.xi * eta);
    a.bottom = static_cast<std::size_t>(static_cast<long>(half) - a.xi * eta);
    means.insert(means.end(), a.top, mu + c / 2.0);
    const double nd = static_cast<double>(n);
    const double quarter = std::pow(nd, -0.25);
    const double inner_c = c * std::sqrt(static_cast<double>(a.eta) / nd);
    for (long j = 1; j <= 2 * eta + 1; ++j) {
      const double centre =
          mu + static_cast<double>(j - eta - 1) / 8.0 * c * quarter;
      a.blocks.push_back(build(inner_c, centre, a.eta));
    }
    means.insert(means.end(), a.bottom, mu - c / 2.0);
    if (validation == HardValidation::kStrict) check_bands(a);
    return a;
  }

  void check_bands(const HardAnnotation& a) const {
    const double quarter = std::pow(static_cast<double>(a.n), -0.25);
    const auto eta = static_cast<long>(a.eta);
    double previous_max = -std::numeric_limits<double>::infinity();
    // Blocks are listed from lowest centre to highest.
    for (std::size_t b = 0; b < a.blocks.size(); ++b) {
      const HardAnnotation& blk = a.blocks[b];
      const double centre =
          a.mu + static_cast<double>(static_cast<long>(b) + 1 - eta - 1) /
                     8.0 * a.c * quarter;
      const double slack = a.c * quarter / 100.0;
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (std::size_t i = blk.first; i < blk.first + blk.n; ++i) {
        lo = std::min(lo, means[i]);
        hi = std::max(hi, means[i]);
      }
      if (lo < centre - slack || hi > centre + slack) {
        throw InvalidParams("block leaves its band at n=" +
                            std::to_string(a.n));
      }
      if (!(lo > a.mu - a.c / 2.0 && hi < a.mu + a.c / 2.0)) {
        throw InvalidParams("block not strictly inside the top/bottom gap");
      }
      if (!(lo > previous_max)) {
        throw InvalidParams("blocks overlap at n=" + std::to_string(a.n));
      }
      previous_max = hi;
    }
  }
};

nlohmann::ordered_json annotation_json(const HardAnnotation& a) {
  nlohmann::ordered_json j;
  j["n"] = a.n;
  j["C"] = a.c;
  j["mu"] = a.mu;
  j["first"] = a.first;
  j["base"] = a.base;
  if (!a.base) {
    j["eta"] = a.eta;
    j["xi"] = a.xi;
  }
  j["top"] = a.top;
  j["bottom"] = a.bottom;
  nlohmann::ordered_json blocks = nlohmann::ordered_json::array();
  for (const auto& b : a.blocks) blocks.push_back(annotation_json(b));
  j["blocks"] = blocks;
  return j;
}

}  // namespace

HardInstance gen_hard(double c, double mu, std::size_t n, std::size_t agents,
                      CounterRng& rng, HardValidation validation,
                      double partition_exponent) {
  if (n < 3) throw InvalidParams("hard instance needs n >= 3");
  if (agents < 1) throw InvalidParams("K must be >= 1");
  HardBuilder b{rng, validation,
                std::pow(static_cast<double>(agents), partition_exponent),
                {}};
  b.means.reserve(n);
  HardAnnotation a = b.build(c, mu, n);
  return HardInstance{Instance(std::move(b.means)), (n - 1) / 2, std::move(a)};
}

std::string annotation_to_json(const HardAnnotation& a) {
  return annotation_json(a).dump();
}

BiasInstance gen_bias(const BiasSpec& spec, CounterRng& rng) {
  if (spec.n < 2) throw InvalidParams("need at least two arms");
  if (!(spec.eps > 0.0 && spec.eps < 0.125)) {
    throw InvalidParams("eps must lie in (0,1/8)");
  }
  if (!(spec.mu > 0.375 && spec.mu < 0.625)) {
    throw InvalidParams("mu must lie in (3/8,5/8)");
  }
  const std::size_t n = spec.n;
  std::vector<int> signs(n, -1);
  double q = std::numeric_limits<double>::quiet_NaN();
  if (spec.uniform) {
    for (int& s : signs) s = rng.below(2) == 1 ? 1 : -1;
  } else {
    if (spec.allowed.empty()) throw InvalidParams("empty count set");
    q = std::numeric_limits<double>::infinity();
    for (std::size_t s : spec.allowed) {
      if (s > n) throw InvalidParams("count exceeds n");
      const double nd = static_cast<double>(n);
      const double sd = static_cast<double>(s);
      const double logq = std::lgamma(nd + 1.0) - std::lgamma(sd + 1.0) -
                          std::lgamma(nd - sd + 1.0) - nd * std::log(2.0);
      q = std::min(q, std::exp(logq));
    }
    const std::size_t plus = spec.allowed[rng.below(spec.allowed.size())];
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < plus; ++i) {
      const std::size_t j = i + rng.below(n - i);
      std::swap(idx[i], idx[j]);
      signs[idx[i]] = 1;
    }
  }
  std::vector<double> means(n);
  long bias = 0;
  std::size_t plus = 0;
  for (std::size_t i = 0; i < n; ++i) {
    means[i] = spec.mu + signs[i] * spec.eps;
    bias += signs[i];
    if (signs[i] > 0) ++plus;
  }
  return BiasInstance{Instance(std::move(means)), std::move(signs), bias, plus,
                      q};
}

}  // namespace collabtopm
