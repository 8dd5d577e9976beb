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

#include "collabtopm/central.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "collabtopm/errors.hpp"

namespace collabtopm {

double beta_radius(std::uint64_t u, std::uint64_t t, std::size_t n,
                   double delta) {
  const double td = static_cast<double>(t);
  const double arg = 5.0 * static_cast<double>(n) * td * td * td * td /
                     (4.0 * delta);
  return std::sqrt(std::log(arg) / (2.0 * static_cast<double>(u)));
}

std::uint64_t AgentSampler::pull(ArmId arm, std::uint64_t count) {
  if (used_ + count > cap_) {
    throw BudgetExceeded("centralized call exceeded its budget");
  }
  used_ += count;
  return exchange_.pull(agent_, arm, count);
}

namespace {

enum class Mode { kLucb, kFixedBudget };

class PacState {
 public:
  PacState(ArmSampler& sampler, std::span<const ArmId> arms, std::size_t m,
           bool flip)
      : sampler_(sampler),
        arms_(arms),
        m_(m),
        flip_(flip),
        pulls_(arms.size(), 0),
        sums_(arms.size(), 0),
        order_(arms.size()) {}

  void pull(std::size_t pos) {
    std::uint64_t r = sampler_.pull(arms_[pos], 1);
    if (flip_) r = 1 - r;
    ++pulls_[pos];
    sums_[pos] += r;
    ++t_;
  }

  double mean(std::size_t pos) const {
    return static_cast<double>(sums_[pos]) / static_cast<double>(pulls_[pos]);
  }

  std::uint64_t t() const { return t_; }

  // Partitions order_ so its first m entries are H.
  void split() {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::nth_element(order_.begin(),
                     order_.begin() + static_cast<std::ptrdiff_t>(m_),
                     order_.end(), [&](std::size_t a, std::size_t b) {
                       const double ma = mean(a), mb = mean(b);
                       return ma != mb ? ma > mb : a < b;
                     });
  }

  // (h*, l*, gap between l*'s upper and h*'s lower confidence bound).
  struct Contenders {
    std::size_t h;
    std::size_t l;
    double overlap;
  };

  Contenders contenders(double delta) const {
    const std::size_t n = arms_.size();
    Contenders c{0, 0, 0.0};
    double low = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < m_; ++k) {
      const std::size_t pos = order_[k];
      const double v = mean(pos) - beta_radius(pulls_[pos], t_, n, delta);
      if (v < low || (v == low && pos < c.h)) {
        low = v;
        c.h = pos;
      }
    }
    double high = -std::numeric_limits<double>::infinity();
    for (std::size_t k = m_; k < n; ++k) {
      const std::size_t pos = order_[k];
      const double v = mean(pos) + beta_radius(pulls_[pos], t_, n, delta);
      if (v > high || (v == high && pos < c.l)) {
        high = v;
        c.l = pos;
      }
    }
    c.overlap = high - low;
    return c;
  }

  CentralResult result(bool stopped) {
    split();
    CentralResult out;
    out.stopped = stopped;
    out.pulls = t_;
    out.selected.reserve(m_);
    for (std::size_t k = 0; k < m_; ++k) out.selected.push_back(arms_[order_[k]]);
    std::sort(out.selected.begin(), out.selected.end());
    out.stats.reserve(arms_.size());
    for (std::size_t pos = 0; pos < arms_.size(); ++pos) {
      const double mu = mean(pos);
      out.stats.push_back({arms_[pos], pulls_[pos], flip_ ? 1.0 - mu : mu});
    }
    return out;
  }

 private:
  ArmSampler& sampler_;
  std::span<const ArmId> arms_;
  std::size_t m_;
  bool flip_;
  std::vector<std::uint64_t> pulls_;
  std::vector<std::uint64_t> sums_;
  std::vector<std::size_t> order_;
  std::uint64_t t_ = 0;
};

void check_pac_args(std::span<const ArmId> arms, std::size_t m) {
  if (arms.size() < 2) throw InvalidParams("need at least two arms");
  if (m < 1 || m >= arms.size()) throw InvalidParams("need 1 <= m <= n-1");
}

CentralResult fixed_budget(ArmSampler& sampler, std::span<const ArmId> arms,
                           std::size_t m, std::uint64_t budget, double delta,
                           bool flip) {
  check_pac_args(arms, m);
  if (budget < arms.size()) {
    throw InsufficientBudget("fixed-budget PAC call needs T >= n");
  }
  PacState s(sampler, arms, m, flip);
  for (std::size_t pos = 0; pos < arms.size(); ++pos) s.pull(pos);
  while (s.t() + 2 <= budget) {
    s.split();
    const auto c = s.contenders(delta);
    s.pull(c.h);
    s.pull(c.l);
  }
  return s.result(true);
}

}  // namespace

CentralResult lucb(ArmSampler& sampler, std::span<const ArmId> arms,
                   std::size_t m, double eps, double delta,
                   std::uint64_t max_pulls) {
  check_pac_args(arms, m);
  PacState s(sampler, arms, m, false);
  for (std::size_t pos = 0; pos < arms.size(); ++pos) s.pull(pos);
  while (true) {
    s.split();
    const auto c = s.contenders(delta);
    if (c.overlap < eps / 2.0) return s.result(true);
    if (s.t() + 2 > max_pulls) return s.result(false);
    s.pull(c.h);
    s.pull(c.l);
  }
}

CentralResult central_approx_top(ArmSampler& sampler,
                                 std::span<const ArmId> arms, std::size_t m,
                                 std::uint64_t budget, double delta) {
  return fixed_budget(sampler, arms, m, budget, delta, false);
}

CentralResult central_approx_btm(ArmSampler& sampler,
                                 std::span<const ArmId> arms, std::size_t m,
                                 std::uint64_t budget, double delta) {
  return fixed_budget(sampler, arms, m, budget, delta, true);
}

}  // namespace collabtopm
