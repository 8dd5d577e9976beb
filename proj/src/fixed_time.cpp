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

#include "collabtopm/fixed_time.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>

#include "collabtopm/central.hpp"
#include "collabtopm/errors.hpp"

namespace collabtopm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<ArmId> sorted_unique(std::span<const ArmId> arms) {
  std::vector<ArmId> out(arms.begin(), arms.end());
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) {
    throw InvalidParams("duplicate arm ids");
  }
  return out;
}

std::size_t position(std::span<const ArmId> universe, ArmId arm) {
  auto it = std::lower_bound(universe.begin(), universe.end(), arm);
  if (it == universe.end() || *it != arm) {
    throw InvalidParams("arm outside the certificate universe");
  }
  return static_cast<std::size_t>(it - universe.begin());
}

Certificate empty_certificate(std::vector<ArmId> universe) {
  Certificate c;
  c.estimates.assign(universe.size(), kNaN);
  c.universe = std::move(universe);
  return c;
}

double agents_log2(std::size_t agents) {
  return std::log2(static_cast<double>(std::max<std::size_t>(agents, 2)));
}

double partition_threshold(std::size_t agents, const Constants& c) {
  return std::pow(static_cast<double>(agents), c.partition_exponent);
}

std::size_t base_rounds(std::size_t agents, const Constants& c) {
  return static_cast<std::size_t>(
      std::ceil(c.partition_exponent * agents_log2(agents) - 1e-9));
}

std::size_t ceil_log2(std::size_t n) {
  std::size_t r = 0;
  while ((std::size_t{1} << r) < n) ++r;
  return r;
}

}  // namespace

std::vector<ArmId> all_arms(std::size_t n) {
  std::vector<ArmId> v(n);
  std::iota(v.begin(), v.end(), ArmId{0});
  return v;
}

double Certificate::estimate(ArmId arm) const {
  return estimates[position(universe, arm)];
}

SarSchedule make_sar_schedule(std::size_t n, std::uint64_t budget,
                              std::size_t rounds) {
  if (rounds < 1) throw InvalidParams("R must be >= 1");
  if (n < 1) throw InvalidParams("empty arm set");
  SarSchedule s;
  s.rounds = rounds;
  const long double nd = static_cast<long double>(n);
  const long double rd = static_cast<long double>(rounds);
  s.survivors.resize(rounds + 2);
  for (std::size_t r = 0; r <= rounds + 1; ++r) {
    const long double v =
        std::pow(nd, 1.0L - static_cast<long double>(r) / rd);
    s.survivors[r] = static_cast<std::size_t>(std::floor(v + 1e-9L));
  }
  s.survivors[0] = n;
  s.cumulative.assign(rounds + 2, 0);
  const auto cap = static_cast<unsigned __int128>(budget);
  for (std::size_t r = 1; r <= rounds + 1; ++r) {
    const long double x =
        std::pow(nd, static_cast<long double>(r - 1) / rd) *
        static_cast<long double>(budget) / (nd * (rd + 1.0L));
    auto t = static_cast<std::uint64_t>(std::floor(x));
    // Guard against rounding up: n_{r-1} * T_r * (R+1) <= T.
    while (t > 0 && static_cast<unsigned __int128>(s.survivors[r - 1]) * t *
                            (rounds + 1) > cap) {
      --t;
    }
    s.cumulative[r] = std::max(t, s.cumulative[r - 1]);
  }
  return s;
}

Certificate collab_top_m_simple(Session& session, std::span<const ArmId> arms,
                                std::size_t m, std::uint64_t budget,
                                std::size_t rounds, SimpleTrace* trace) {
  std::vector<ArmId> universe = sorted_unique(arms);
  const std::size_t n = universe.size();
  if (m > n) throw InvalidParams("m exceeds the number of arms");
  Certificate cert = empty_certificate(universe);
  if (m == 0) return cert;
  if (m == n) {
    cert.selected = universe;
    return cert;
  }
  const SarSchedule sch = make_sar_schedule(n, budget, rounds);
  if (sch.cumulative[1] == 0) {
    throw InsufficientBudget("first phase budget floors to zero");
  }

  const std::size_t k = session.agents();
  std::vector<std::uint64_t> pulls(n, 0), sums(n, 0);
  auto mean = [&](std::size_t p) {
    return static_cast<double>(sums[p]) / static_cast<double>(pulls[p]);
  };
  std::vector<std::size_t> active = all_arms(n);
  std::size_t accepted = 0;
  Exchange ex(session, budget);
  std::vector<double> gap;

  for (std::size_t r = 0; r <= rounds; ++r) {
    const std::uint64_t inc = sch.cumulative[r + 1] - sch.cumulative[r];
    if (inc > 0 && !active.empty()) {
      for (std::size_t p : active) {
        sums[p] += ex.pull_all(universe[p], inc);
        pulls[p] += inc * k;
      }
      ex.end_round();
    }
    if (active.empty()) continue;

    // sigma_r: by empirical mean, ties by id.
    std::stable_sort(active.begin(), active.end(),
                     [&](std::size_t a, std::size_t b) {
                       return mean(a) > mean(b);
                     });
    const std::size_t mr = m - accepted;
    const std::size_t size = active.size();
    const double upper_ref = mr < size ? mean(active[mr]) : -kInf;
    const double lower_ref = mr >= 1 ? mean(active[mr - 1]) : kInf;
    gap.assign(size, 0.0);
    for (std::size_t rank = 0; rank < size; ++rank) {
      const double v = mean(active[rank]);
      gap[rank] = rank < mr ? v - upper_ref : lower_ref - v;
    }
    const std::size_t drop = std::min(
        size, sch.survivors[r] - std::min(sch.survivors[r],
                                          sch.survivors[r + 1]));
    std::vector<std::size_t> by_gap(size);
    std::iota(by_gap.begin(), by_gap.end(), std::size_t{0});
    std::stable_sort(by_gap.begin(), by_gap.end(),
                     [&](std::size_t a, std::size_t b) {
                       return gap[a] > gap[b];
                     });
    std::vector<bool> gone(size, false);
    SimplePhase phase;
    if (trace) {
      for (std::size_t p : active) phase.active.push_back(universe[p]);
      phase.pivot = mr;
    }
    for (std::size_t j = 0; j < drop; ++j) {
      const std::size_t rank = by_gap[j];
      const std::size_t p = active[rank];
      gone[rank] = true;
      cert.estimates[p] = mean(p);
      if (rank < mr) {
        cert.selected.push_back(universe[p]);
        ++accepted;
        if (trace) phase.accepted.push_back(universe[p]);
      } else if (trace) {
        phase.rejected.push_back(universe[p]);
      }
    }
    std::vector<std::size_t> next;
    next.reserve(size - drop);
    for (std::size_t rank = 0; rank < size; ++rank) {
      if (!gone[rank]) next.push_back(active[rank]);
    }
    std::sort(next.begin(), next.end());
    active = std::move(next);
    if (trace) trace->phases.push_back(std::move(phase));
  }
  std::sort(cert.selected.begin(), cert.selected.end());
  return cert;
}

std::size_t collab_round_bound(std::size_t n, std::size_t agents,
                               const Constants& c) {
  const double ratio = std::log(static_cast<double>(n)) /
                       (c.partition_exponent * std::log(2.0) *
                        agents_log2(agents));
  std::size_t levels = 1;
  if (ratio > 1.0) {
    levels = std::max<std::size_t>(
        1, static_cast<std::size_t>(
               std::ceil(std::log(ratio) / std::log(8.0 / 7.0) - 1e-9)));
  }
  return levels + base_rounds(agents, c) + 1;
}

std::uint64_t collab_min_budget(std::size_t n, std::size_t agents,
                                const Constants& c) {
  if (static_cast<double>(n) <= partition_threshold(agents, c)) {
    return 2 * static_cast<std::uint64_t>(n) * (ceil_log2(n) + 1);
  }
  const std::size_t r = collab_round_bound(n, agents, c);
  return 4 * static_cast<std::uint64_t>(r) *
         ((n + agents - 1) / std::max<std::size_t>(agents, 1));
}

Certificate collab_top_m(Session& session, std::span<const ArmId> arms,
                         std::size_t m, std::uint64_t budget,
                         const Constants& c, CollabTrace* trace) {
  std::vector<ArmId> universe = sorted_unique(arms);
  const std::size_t n = universe.size();
  if (m > n) throw InvalidParams("m exceeds the number of arms");
  Certificate cert = empty_certificate(universe);
  const std::size_t k = session.agents();
  const double kd = static_cast<double>(k);
  const std::size_t big_r = collab_round_bound(n, k, c);
  const std::size_t level_limit = big_r - base_rounds(k, c) - 1;
  const double delta = 1.0 / (100.0 * static_cast<double>(big_r));
  const double threshold = partition_threshold(k, c);
  if (trace) trace->round_bound = big_r;

  std::vector<ArmId> current = universe;
  std::size_t mc = m;
  std::size_t depth = 0;
  while (true) {
    const std::size_t nc = current.size();
    if (mc == 0) break;
    if (mc >= nc) {
      cert.selected.insert(cert.selected.end(), current.begin(), current.end());
      break;
    }
    const bool base_case = static_cast<double>(nc) <= threshold;
    if (!base_case && depth < level_limit) {
      const double nd = static_cast<double>(nc);
      const double q =
          4.0 * kd * std::sqrt(nd * std::log(nd * static_cast<double>(big_r)));
      const double md = static_cast<double>(mc);
      const std::size_t ell =
          md > q ? static_cast<std::size_t>(std::floor((md - q) / kd)) : 0;
      const std::size_t rej =
          nd - md > q ? static_cast<std::size_t>(std::floor((nd - md - q) / kd))
                      : 0;
      if (ell > 0 || rej > 0) {
        const std::uint64_t level_budget =
            budget / (4 * static_cast<std::uint64_t>(big_r));
        std::vector<std::vector<ArmId>> parts(k);
        for (ArmId a : current) {
          parts[session.coordinator_rng().below(k)].push_back(a);
        }
        Exchange ex(session, 2 * level_budget);
        std::vector<ArmId> acc, rj;
        for (std::size_t i = 0; i < k; ++i) {
          if (ell > 0 && ell < parts[i].size()) {
            AgentSampler s(ex, i, level_budget);
            auto res = central_approx_top(s, parts[i], ell, level_budget,
                                          delta / (2.0 * kd));
            acc.insert(acc.end(), res.selected.begin(), res.selected.end());
          }
          if (rej > 0 && rej < parts[i].size()) {
            AgentSampler s(ex, i, level_budget);
            auto res = central_approx_btm(s, parts[i], rej, level_budget,
                                          delta / (2.0 * kd));
            rj.insert(rj.end(), res.selected.begin(), res.selected.end());
          }
        }
        for (const ArmStat& st : ex.end_round()) {
          cert.estimates[position(universe, st.arm)] = st.mean;
        }
        std::sort(acc.begin(), acc.end());
        std::sort(rj.begin(), rj.end());
        std::vector<ArmId> rj_only;
        std::set_difference(rj.begin(), rj.end(), acc.begin(), acc.end(),
                            std::back_inserter(rj_only));
        std::vector<ArmId> decided;
        std::set_union(acc.begin(), acc.end(), rj_only.begin(), rj_only.end(),
                       std::back_inserter(decided));
        std::vector<ArmId> rest;
        std::set_difference(current.begin(), current.end(), decided.begin(),
                            decided.end(), std::back_inserter(rest));
        if (trace) {
          trace->levels.push_back({nc, mc, acc, rj_only});
        }
        cert.selected.insert(cert.selected.end(), acc.begin(), acc.end());
        mc -= acc.size();
        current = std::move(rest);
        ++depth;
        continue;
      }
    }
    std::size_t rs = std::max<std::size_t>(1, ceil_log2(nc));
    if (!base_case) {
      rs = std::max<std::size_t>(1, std::min(rs, big_r - depth - 1));
      if (trace) trace->forced_simple = true;
    }
    if (trace) trace->simple_rounds = rs;
    const Certificate sub =
        collab_top_m_simple(session, current, mc, budget / 2, rs);
    for (std::size_t j = 0; j < sub.universe.size(); ++j) {
      cert.estimates[position(universe, sub.universe[j])] = sub.estimates[j];
    }
    cert.selected.insert(cert.selected.end(), sub.selected.begin(),
                         sub.selected.end());
    break;
  }
  std::sort(cert.selected.begin(), cert.selected.end());
  return cert;
}

std::optional<std::vector<ArmId>> verify_top_m(Session& session,
                                               std::span<const ArmId> arms,
                                               std::size_t m,
                                               const Certificate& cert,
                                               double gamma,
                                               std::uint64_t budget) {
  if (!(gamma > 0.0)) throw InvalidParams("gamma must be positive");
  const std::vector<ArmId> universe = sorted_unique(arms);
  std::vector<ArmId> chosen = sorted_unique(cert.selected);
  if (chosen.size() != m) return std::nullopt;
  std::vector<ArmId> rest;
  std::set_difference(universe.begin(), universe.end(), chosen.begin(),
                      chosen.end(), std::back_inserter(rest));
  if (rest.size() + chosen.size() != universe.size()) {
    throw InvalidParams("certificate set is not a subset of the arms");
  }
  if (chosen.empty() || rest.empty()) return chosen;

  double low = kInf, high = -kInf;
  for (ArmId a : chosen) low = std::min(low, cert.estimate(a));
  for (ArmId a : rest) high = std::max(high, cert.estimate(a));
  const std::size_t n = universe.size();
  std::vector<double> delta(n);
  std::vector<bool> in_s(n, false);
  for (ArmId a : chosen) in_s[position(universe, a)] = true;
  for (std::size_t j = 0; j < n; ++j) {
    const double est = cert.estimate(universe[j]);
    delta[j] = in_s[j] ? est - high : low - est;
    if (!(delta[j] > 0.0)) return std::nullopt;  // NaN lands here too
  }

  // Integer per-arm counts; feasibility is judged on their sum.
  const long double capacity = static_cast<long double>(session.agents()) *
                               static_cast<long double>(budget);
  std::vector<std::uint64_t> count(n);
  long double total = 0.0L;
  for (std::size_t j = 0; j < n; ++j) {
    const long double c =
        std::ceil(64.0L * gamma / (static_cast<long double>(delta[j]) * delta[j]));
    total += c;
    if (total > capacity) return std::nullopt;
    count[j] = static_cast<std::uint64_t>(c);
  }

  Exchange ex(session, budget);
  std::vector<double> hat(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::uint64_t reward = ex.pull_spread(universe[j], count[j]);
    hat[j] = static_cast<double>(reward) / static_cast<double>(count[j]);
  }
  ex.end_round();
  double s_low = kInf, r_high = -kInf;
  for (std::size_t j = 0; j < n; ++j) {
    if (in_s[j]) {
      s_low = std::min(s_low, hat[j] - delta[j] / 4.0);
    } else {
      r_high = std::max(r_high, hat[j] + delta[j] / 4.0);
    }
  }
  if (s_low > r_high) return chosen;
  return std::nullopt;
}

Certificate aggregate_certificates(std::span<const Certificate> certs) {
  if (certs.empty()) throw InvalidParams("nothing to aggregate");
  std::map<std::vector<ArmId>, std::size_t> votes;
  for (const Certificate& c : certs) {
    if (c.universe != certs.front().universe) {
      throw InvalidParams("certificates over different arm sets");
    }
    ++votes[c.selected];
  }
  Certificate out;
  std::size_t best = 0;
  for (const auto& [set, count] : votes) {  // lexicographic order
    if (count > best) {
      best = count;
      out.selected = set;
    }
  }
  out.universe = certs.front().universe;
  out.estimates.assign(out.universe.size(), kNaN);
  std::vector<double> column;
  for (std::size_t j = 0; j < out.universe.size(); ++j) {
    column.clear();
    for (const Certificate& c : certs) {
      if (!std::isnan(c.estimates[j])) column.push_back(c.estimates[j]);
    }
    if (column.empty()) continue;
    const std::size_t mid = (column.size() - 1) / 2;
    std::nth_element(column.begin(),
                     column.begin() + static_cast<std::ptrdiff_t>(mid),
                     column.end());
    out.estimates[j] = column[mid];
  }
  return out;
}

GeneralResult collab_top_m_general(Session& session,
                                   std::span<const ArmId> arms, std::size_t m,
                                   std::uint64_t budget, const Constants& c) {
  const std::vector<ArmId> universe = sorted_unique(arms);
  if (m > universe.size()) throw InvalidParams("m exceeds the number of arms");
  const long double scale =
      3.0L * static_cast<long double>(budget) /
      (std::numbers::pi_v<long double> * std::numbers::pi_v<long double>);
  auto copy_budget = [&](std::size_t s) {
    const long double sd = static_cast<long double>(s);
    return static_cast<std::uint64_t>(
        std::floor(scale / (sd * sd * std::pow(4.0L, sd))));
  };
  std::size_t levels = 0;
  while (copy_budget(levels + 1) >= 1) ++levels;

  const std::uint64_t min_budget =
      collab_min_budget(universe.size(), session.agents(), c);
  std::vector<std::vector<Certificate>> certs(levels + 1);
  ParallelBlock copies(session);
  for (std::size_t s = 1; s <= levels; ++s) {
    const std::uint64_t b = copy_budget(s);
    if (b < min_budget) continue;
    const std::size_t count = std::size_t{1} << (2 * s);
    for (std::size_t j = 0; j < count; ++j) {
      copies.next_copy();
      try {
        certs[s].push_back(collab_top_m(session, universe, m, b, c));
      } catch (const InsufficientBudget&) {
      }
    }
  }
  copies.finish();

  GeneralResult out;
  out.levels = levels;
  ParallelBlock checks(session);
  for (std::size_t s = 1; s <= levels; ++s) {
    if (certs[s].empty()) continue;
    const Certificate agg = aggregate_certificates(certs[s]);
    const long double sd = static_cast<long double>(s);
    const auto verify_budget =
        static_cast<std::uint64_t>(std::floor(scale / (sd * sd)));
    checks.next_copy();
    auto verdict = verify_top_m(session, universe, m, agg,
                                std::pow(4.0, static_cast<double>(s)),
                                verify_budget);
    if (verdict) {
      out.selected = std::move(*verdict);
      out.best_level = s;
    }
  }
  checks.finish();
  if (out.best_level == 0) {
    out.fallback = true;
    out.selected.assign(universe.begin(),
                        universe.begin() + static_cast<std::ptrdiff_t>(m));
  }
  return out;
}

}  // namespace collabtopm
