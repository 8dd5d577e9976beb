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

#include "collabtopm/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "collabtopm/errors.hpp"

namespace collabtopm {

namespace {

constexpr double kE = std::numbers::e;

double best_arm_h(std::span<const double> means) {
  if (means.size() < 2) return 0.0;
  try {
    return complexity_h(means, 1);
  } catch (const DegeneratePivot&) {
    return std::numeric_limits<double>::infinity();
  }
}

double cube(double x) { return x * x * x; }

std::size_t ceil_log2(std::size_t n) {
  std::size_t r = 0;
  while ((std::size_t{1} << r) < n) ++r;
  return r;
}

// Uniform k-subset of `universe` (Floyd), ascending. `marks` is all-zero
// scratch of universe size and is left all-zero.
std::vector<ArmId> floyd_subset(CounterRng& rng,
                                std::span<const ArmId> universe,
                                std::size_t k,
                                std::vector<unsigned char>& marks) {
  const std::size_t n = universe.size();
  std::vector<std::size_t> picked;
  picked.reserve(k);
  for (std::size_t j = n - k; j < n; ++j) {
    std::size_t t = rng.below(j + 1);
    if (marks[t]) t = j;
    marks[t] = 1;
    picked.push_back(t);
  }
  std::sort(picked.begin(), picked.end());
  std::vector<ArmId> out;
  out.reserve(k);
  for (std::size_t p : picked) {
    marks[p] = 0;
    out.push_back(universe[p]);
  }
  return out;
}

std::uint64_t reduced_budget(std::uint64_t budget, const BudgetFns& fns) {
  const double b = fns.beta(budget);
  if (!(b > 1.0)) return budget;
  return static_cast<std::uint64_t>(
      std::floor(static_cast<long double>(budget) / b));
}

std::optional<ArmId> subset_impl(Session& session,
                                 std::span<const ArmId> universe,
                                 std::size_t m, double delta,
                                 std::uint64_t budget, const BudgetFns& fns,
                                 SubsetDraw* draw,
                                 std::vector<unsigned char>& marks) {
  CounterRng& rng = session.coordinator_rng();
  const std::size_t n = universe.size();
  const auto size = static_cast<std::size_t>(
      draw_rewards(rng, n, 1.0 / static_cast<double>(m)));
  const bool reduced = rng.below(2) == 1;
  const std::uint64_t tau = reduced ? reduced_budget(budget, fns) : budget;
  if (draw) *draw = {size, reduced, tau};
  if (size == 0) return std::nullopt;
  const std::vector<ArmId> v = floyd_subset(rng, universe, size, marks);
  return best_arm_verified(session, v, delta, tau);
}

// Largest subset size that can still pass verification with budget tau:
// estimated gaps never exceed 1, so each arm needs at least ceil(64 gamma)
// verification pulls, and the best-arm stage must give every arm a pull.
std::size_t feasible_size(std::uint64_t tau, std::size_t n, double delta,
                          std::size_t agents) {
  const std::uint64_t half = tau / 2;
  const std::uint64_t per_round = half / best_arm_rounds(agents);
  const long double capacity =
      static_cast<long double>(agents) * static_cast<long double>(half);
  std::size_t best = 1;
  for (std::size_t v = 2; v <= n; ++v) {
    const double gamma = std::log(static_cast<double>(v) / delta);
    const long double need =
        static_cast<long double>(v) * std::ceil(64.0L * gamma);
    if (per_round / v == 0 || need > capacity) break;
    best = v;
  }
  return best;
}

// P(|V| = v) for |V| ~ Bin(n, p), v = 0..n.
std::vector<long double> size_pmf(std::size_t n, long double p) {
  std::vector<long double> pmf(n + 1, 0.0L);
  if (p >= 1.0L) {  // the log form below would hit 0 * -inf
    pmf[n] = 1.0L;
    return pmf;
  }
  const long double lp = std::log(p), lq = std::log1p(-p);
  for (std::size_t v = 0; v <= n; ++v) {
    const long double vv = static_cast<long double>(v);
    const long double nn = static_cast<long double>(n);
    pmf[v] = std::exp(std::lgamma(nn + 1) - std::lgamma(vv + 1) -
                      std::lgamma(nn - vv + 1) + vv * lp + (nn - vv) * lq);
  }
  return pmf;
}

// Copies per subset size 0..cap for `count` i.i.d. copies; sizes above cap
// are lumped together and not returned.
std::vector<std::uint64_t> draw_sizes(CounterRng& rng, std::uint64_t count,
                                      std::span<const long double> pmf,
                                      std::size_t cap) {
  std::vector<long double> tail(pmf.size() + 1, 0.0L);
  for (std::size_t v = pmf.size(); v-- > 0;) tail[v] = tail[v + 1] + pmf[v];
  std::vector<std::uint64_t> out(cap + 1, 0);
  std::uint64_t left = count;
  for (std::size_t v = 0; v <= cap && left > 0; ++v) {
    if (!(tail[v] > 0.0L)) break;
    const double p = static_cast<double>(std::min(1.0L, pmf[v] / tail[v]));
    out[v] = p >= 1.0 ? left : draw_rewards(rng, left, p);
    left -= out[v];
  }
  return out;
}

std::vector<ArmId> sorted_arms(std::span<const ArmId> arms) {
  std::vector<ArmId> out(arms.begin(), arms.end());
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) {
    throw InvalidParams("duplicate arm ids");
  }
  return out;
}

}  // namespace

double BudgetFns::f(std::span<const double> subset_means, double delta,
                    double eta) const {
  const double k = static_cast<double>(agents_);
  return c_f_ * (best_arm_h(subset_means) / k) * cube(std::log(eta * k)) *
         std::log(static_cast<double>(subset_means.size()) / delta);
}

double BudgetFns::g(std::span<const double> subset_means,
                    double delta) const {
  const double k = static_cast<double>(agents_);
  return c_g_ * (best_arm_h(subset_means) / k) *
         std::log(static_cast<double>(subset_means.size()) / delta);
}

double BudgetFns::beta(std::uint64_t budget) const {
  return (c_f_ / c_g_) *
         cube(std::log(static_cast<double>(budget) *
                       static_cast<double>(agents_)));
}

double BudgetFns::fixed_point(std::span<const double> subset_means,
                              double delta, double eta0) const {
  return f(subset_means, delta, eta0);
}

std::size_t best_arm_rounds(std::size_t agents) {
  return std::max<std::size_t>(1, ceil_log2(agents));
}

Certificate best_arm_collab(Session& session, std::span<const ArmId> arms,
                            std::uint64_t budget, std::size_t rounds,
                            bool flipped) {
  if (rounds < 1) throw InvalidParams("R must be >= 1");
  const std::vector<ArmId> universe = sorted_arms(arms);
  const std::size_t n = universe.size();
  if (n == 0) throw InvalidParams("empty arm set");
  Certificate cert;
  cert.universe = universe;
  cert.estimates.assign(n, std::numeric_limits<double>::quiet_NaN());
  if (n == 1) {
    cert.selected = universe;
    return cert;
  }
  const std::uint64_t per_round = budget / rounds;
  if (per_round / n == 0) {
    throw InsufficientBudget("best-arm allocation floors to zero");
  }
  const std::uint64_t k = session.agents();
  std::vector<std::uint64_t> pulls(n, 0), sums(n, 0);
  auto mean = [&](std::size_t p) {
    return static_cast<double>(sums[p]) / static_cast<double>(pulls[p]);
  };
  std::vector<std::size_t> alive = all_arms(n);
  std::vector<double> current(n);
  Exchange ex(session, budget);
  for (std::size_t r = 1; r <= rounds && alive.size() > 1; ++r) {
    const std::uint64_t alloc = per_round / alive.size();
    if (alloc == 0) throw InsufficientBudget("best-arm allocation is zero");
    for (std::size_t p : alive) {
      std::uint64_t reward = ex.pull_all(universe[p], alloc);
      if (flipped) reward = alloc * k - reward;
      sums[p] += reward;
      pulls[p] += alloc * k;
    }
    ex.end_round();
    for (std::size_t p : alive) current[p] = mean(p);
    // Higher mean first, smaller index on ties.
    const std::size_t keep = r < rounds ? (alive.size() + 1) / 2 : 1;
    std::nth_element(alive.begin(), alive.begin() + static_cast<std::ptrdiff_t>(keep - 1),
                     alive.end(), [&](std::size_t a, std::size_t b) {
                       return current[a] != current[b] ? current[a] > current[b] : a < b;
                     });
    alive.resize(keep);
    std::sort(alive.begin(), alive.end());
  }
  for (std::size_t p = 0; p < n; ++p) {
    if (pulls[p] == 0) continue;
    const double mu = mean(p);
    cert.estimates[p] = flipped ? 1.0 - mu : mu;
  }
  cert.selected = {universe[alive.front()]};
  return cert;
}

std::optional<ArmId> best_arm_verified(Session& session,
                                       std::span<const ArmId> arms,
                                       double delta, std::uint64_t budget) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidParams("delta in (0,1)");
  if (budget == 0 || arms.empty()) return std::nullopt;
  if (arms.size() == 1) return arms.front();
  Certificate cert;
  try {
    cert = best_arm_collab(session, arms, budget / 2,
                           best_arm_rounds(session.agents()));
  } catch (const InsufficientBudget&) {
    return std::nullopt;
  }
  const double gamma =
      std::log(static_cast<double>(arms.size()) / delta);
  auto verdict = verify_top_m(session, arms, 1, cert, gamma, budget / 2);
  if (!verdict) return std::nullopt;
  return verdict->front();
}

std::optional<ArmId> subset_best_arm(Session& session,
                                     std::span<const ArmId> arms,
                                     std::size_t m, double delta,
                                     std::uint64_t budget, const Constants& c,
                                     SubsetDraw* draw) {
  if (m < 1) throw InvalidParams("m must be >= 1");
  const std::vector<ArmId> universe = sorted_arms(arms);
  std::vector<unsigned char> marks(universe.size(), 0);
  return subset_impl(session, universe, m, delta, budget,
                     BudgetFns(c, session.agents()), draw, marks);
}

long double reduction_copies(std::size_t m, double delta, double gamma) {
  return std::ceil(25.0L * static_cast<long double>(m) *
                   std::pow(4.0L, static_cast<long double>(gamma)) /
                   (static_cast<long double>(delta) * delta));
}

ReductionResult reduction(Session& session, std::span<const ArmId> arms,
                          std::size_t m, double delta, double gamma,
                          std::uint64_t budget, const Constants& c) {
  ReductionResult out;
  out.universe = sorted_arms(arms);
  const std::size_t n = out.universe.size();
  if (m < 1 || m > n) throw InvalidParams("need 1 <= m <= n");
  out.frequency.assign(n, 0);
  out.copies = reduction_copies(m, delta, gamma);
  if (out.copies > 4.0e18L) throw InvalidParams("copy count overflows");
  const auto z = static_cast<std::uint64_t>(out.copies);
  out.per_copy_budget = budget / z;
  const BudgetFns fns(c, session.agents());
  const std::size_t k = session.agents();

  // Each copy draws |V| ~ Bin(n, 1/m) and a fair coin for tau. Copies are
  // grouped by (coin, |V|); those that cannot pass verification are never
  // run since their answer is fixed to bottom.
  CounterRng& rng = session.coordinator_rng();
  const std::uint64_t taus[2] = {out.per_copy_budget,
                                 reduced_budget(out.per_copy_budget, fns)};
  const std::uint64_t reduced = draw_rewards(rng, z, 0.5);
  const std::uint64_t counts[2] = {z - reduced, reduced};
  const std::vector<long double> pmf =
      size_pmf(n, 1.0L / static_cast<long double>(m));
  std::vector<std::uint64_t> by_size[2];
  std::uint64_t singles = 0, possible = 0;
  for (int side = 0; side < 2; ++side) {
    if (taus[side] == 0) continue;
    const std::size_t cap = feasible_size(taus[side], n, delta, k);
    by_size[side] = draw_sizes(rng, counts[side], pmf, cap);
    for (std::size_t v = 1; v < by_size[side].size(); ++v) {
      possible += by_size[side][v];
    }
    if (by_size[side].size() > 1) singles += by_size[side][1];
  }

  // Singleton subsets return their arm without sampling.
  std::uint64_t left = singles;
  for (std::size_t j = 0; j < n && left > 0; ++j) {
    const double p = 1.0 / static_cast<double>(n - j);
    const std::uint64_t here = j + 1 == n ? left : draw_rewards(rng, left, p);
    out.frequency[j] += here;
    left -= here;
  }

  const long double zl = static_cast<long double>(z);
  const long double em = kE * static_cast<long double>(m);
  const auto need = static_cast<std::uint64_t>(std::ceil(zl * 3.0L / (4.0L * em)));
  out.simulated = singles;
  if (possible < static_cast<std::uint64_t>(m) * need) {
    // Fewer than m arms can reach the acceptance frequency.
    out.bounded = true;
    out.aggregated = true;
    return out;
  }
  std::vector<unsigned char> marks(n, 0);
  ParallelBlock block(session);
  for (int side = 0; side < 2; ++side) {
    for (std::size_t v = 2; v < by_size[side].size(); ++v) {
      for (std::uint64_t j = 0; j < by_size[side][v]; ++j) {
        block.next_copy();
        const std::vector<ArmId> subset = floyd_subset(rng, out.universe, v, marks);
        const auto arm = best_arm_verified(session, subset, delta, taus[side]);
        if (arm) {
          const auto it =
              std::lower_bound(out.universe.begin(), out.universe.end(), *arm);
          ++out.frequency[static_cast<std::size_t>(it - out.universe.begin())];
        }
        ++out.simulated;
      }
    }
  }
  block.finish();
  out.aggregated = out.simulated < z;

  std::vector<std::uint64_t> sorted = out.frequency;
  std::nth_element(sorted.begin(),
                   sorted.begin() + static_cast<std::ptrdiff_t>(m - 1),
                   sorted.end(), std::greater<>());
  if (static_cast<long double>(sorted[m - 1]) / zl < 3.0L / (4.0L * em)) {
    return out;
  }
  std::vector<ArmId> keep;
  for (std::size_t j = 0; j < n; ++j) {
    if (static_cast<long double>(out.frequency[j]) / zl >= 1.0L / (16.0L * em)) {
      keep.push_back(out.universe[j]);
    }
  }
  out.candidates = std::move(keep);
  return out;
}

ReductionGeneralResult reduction_general(Session& session,
                                         std::span<const ArmId> arms,
                                         std::size_t m, std::uint64_t budget,
                                         const Constants& c) {
  const std::vector<ArmId> universe = sorted_arms(arms);
  if (m < 1 || m > universe.size()) throw InvalidParams("need 1 <= m <= n");
  constexpr double kDelta = 1.0 / 25.0;
  const long double pi2 =
      std::numbers::pi_v<long double> * std::numbers::pi_v<long double>;
  auto level_budget = [&](std::size_t s) {
    const long double sd = static_cast<long double>(s);
    return static_cast<std::uint64_t>(
        std::floor(6.0L * static_cast<long double>(budget) / (pi2 * sd * sd)));
  };
  ReductionGeneralResult out;
  std::size_t levels = 0;
  while (true) {
    const std::size_t s = levels + 1;
    const long double z =
        reduction_copies(m, kDelta, static_cast<double>(s));
    if (static_cast<long double>(level_budget(s)) < z) break;
    levels = s;
  }
  out.levels = levels;
  ParallelBlock block(session);
  for (std::size_t s = 1; s <= levels; ++s) {
    block.next_copy();
    auto res = reduction(session, universe, m, kDelta, static_cast<double>(s),
                         level_budget(s), c);
    if (res.candidates) {
      out.candidates = std::move(*res.candidates);
      out.best_level = s;
    }
  }
  block.finish();
  if (out.best_level == 0) {
    out.fallback = true;
    out.candidates.assign(universe.begin(),
                          universe.begin() + static_cast<std::ptrdiff_t>(m));
  }
  return out;
}

ImprovedResult collab_top_m_improved(Session& session,
                                     std::span<const ArmId> arms,
                                     std::size_t m, std::uint64_t budget,
                                     const Constants& c) {
  ImprovedResult out;
  auto red = reduction_general(session, arms, m, budget / 2, c);
  out.candidates = red.candidates;
  out.reduction_fallback = red.fallback;
  // A fallback set carries no information; let the second stage see all arms.
  if (red.fallback) out.candidates = sorted_arms(arms);
  if (out.candidates.size() == m) {
    out.selected = out.candidates;
    return out;
  }
  auto gen = collab_top_m_general(session, out.candidates, m, budget / 2, c);
  out.selected = std::move(gen.selected);
  out.fallback = gen.fallback;
  return out;
}

ArmId select_mth_arm(Session& session, std::span<const ArmId> arms,
                     std::size_t m, std::uint64_t budget, const Constants& c) {
  const std::vector<ArmId> universe = sorted_arms(arms);
  if (m < 1 || m > universe.size()) throw InvalidParams("need 1 <= m <= n");
  std::vector<ArmId> top =
      m == universe.size()
          ? universe
          : collab_top_m_improved(session, universe, m, budget / 2, c).selected;
  if (top.size() == 1) return top.front();
  const Certificate worst = best_arm_collab(
      session, top, budget / 2, best_arm_rounds(session.agents()), true);
  return worst.selected.front();
}

}  // namespace collabtopm
