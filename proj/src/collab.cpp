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

#include "collabtopm/collab.hpp"

#include <algorithm>
#include <ostream>

#include "collabtopm/errors.hpp"
#include "json.hpp"

namespace collabtopm {

void CollabConfig::validate() const {
  if (agents < 1) throw InvalidParams("K must be >= 1");
  if (horizon < 1) throw InvalidParams("T must be >= 1");
  if (round_cap < 1) throw InvalidParams("round cap must be >= 1");
}

PullLedger::PullLedger(std::size_t agents, std::size_t arms,
                       std::uint64_t horizon)
    : agents_(agents),
      arms_(arms),
      horizon_(horizon),
      arm_pulls_(arms, 0),
      arm_reward_(arms, 0) {}

PullLedger::Round& PullLedger::round_at(std::size_t round) {
  if (round >= rounds_.size()) rounds_.resize(round + 1);
  auto& slot = rounds_[round];
  if (!slot) {
    slot = std::make_unique<Round>();
    slot->counts.assign(agents_ * arms_, 0);
    slot->totals.assign(agents_, 0);
  }
  return *slot;
}

const PullLedger::Round* PullLedger::find(std::size_t round) const {
  return round < rounds_.size() ? rounds_[round].get() : nullptr;
}

void PullLedger::check_arm(ArmId arm) const {
  if (arm >= arms_) throw InvalidParams("arm index out of range");
}

void PullLedger::charge(Round& r, std::size_t agent, std::uint64_t pulls) {
  r.totals[agent] += pulls;
  if (r.totals[agent] > r.max) {
    time_ += r.totals[agent] - r.max;
    r.max = r.totals[agent];
  }
}

void PullLedger::record(std::size_t round, std::size_t agent, ArmId arm,
                        std::uint64_t pulls, std::uint64_t reward) {
  check_arm(arm);
  if (agent >= agents_) throw InvalidParams("agent index out of range");
  if (pulls == 0) return;
  Round& r = round_at(round);
  const std::uint64_t after = r.totals[agent] + pulls;
  if (after > r.max && time_ + (after - r.max) > horizon_) {
    throw BudgetExceeded("pull would exceed the time horizon");
  }
  charge(r, agent, pulls);
  const std::size_t cell = agent * arms_ + arm;
  r.counts[cell] += pulls;
  if (r.agent_rewards.empty()) r.agent_rewards.assign(r.counts.size(), 0);
  r.agent_rewards[cell] += reward;
  arm_pulls_[arm] += pulls;
  arm_reward_[arm] += reward;
}

void PullLedger::record_pooled(std::size_t round, ArmId arm,
                               std::span<const std::uint64_t> per_agent,
                               std::uint64_t reward) {
  check_arm(arm);
  if (per_agent.size() != agents_) throw InvalidParams("per-agent size");
  Round& r = round_at(round);
  std::uint64_t new_max = r.max;
  std::uint64_t total = 0;
  for (std::size_t a = 0; a < agents_; ++a) {
    new_max = std::max(new_max, r.totals[a] + per_agent[a]);
    total += per_agent[a];
  }
  if (time_ + (new_max - r.max) > horizon_) {
    throw BudgetExceeded("pull would exceed the time horizon");
  }
  for (std::size_t a = 0; a < agents_; ++a) {
    if (per_agent[a] == 0) continue;
    charge(r, a, per_agent[a]);
    r.counts[a * arms_ + arm] += per_agent[a];
  }
  arm_pulls_[arm] += total;
  arm_reward_[arm] += reward;
}

void PullLedger::record_uniform(std::size_t round, ArmId arm,
                                std::uint64_t per_agent, std::uint64_t reward) {
  check_arm(arm);
  if (per_agent == 0) return;
  Round& r = round_at(round);
  // Every agent grows by the same amount, so the busiest one stays busiest.
  if (time_ + per_agent > horizon_) {
    throw BudgetExceeded("pull would exceed the time horizon");
  }
  for (std::size_t a = 0; a < agents_; ++a) {
    r.totals[a] += per_agent;
    r.counts[a * arms_ + arm] += per_agent;
  }
  r.max += per_agent;
  time_ += per_agent;
  arm_pulls_[arm] += per_agent * agents_;
  arm_reward_[arm] += reward;
}

std::uint64_t PullLedger::round_max(std::size_t round) const {
  const Round* r = find(round);
  return r ? r->max : 0;
}

std::uint64_t PullLedger::round_agent_total(std::size_t round,
                                            std::size_t agent) const {
  const Round* r = find(round);
  return r ? r->totals.at(agent) : 0;
}

std::uint64_t PullLedger::cell_pulls(std::size_t round, std::size_t agent,
                                     ArmId arm) const {
  const Round* r = find(round);
  return r ? r->counts.at(agent * arms_ + arm) : 0;
}

std::uint64_t PullLedger::cell_individual_reward(std::size_t round,
                                                 std::size_t agent,
                                                 ArmId arm) const {
  const Round* r = find(round);
  if (!r || r->agent_rewards.empty()) return 0;
  return r->agent_rewards.at(agent * arms_ + arm);
}

ArmStat PullLedger::merged(ArmId arm) const {
  check_arm(arm);
  ArmStat s{arm, arm_pulls_[arm], 0.0};
  if (s.pulls > 0) {
    s.mean = static_cast<double>(arm_reward_[arm]) /
             static_cast<double>(s.pulls);
  }
  return s;
}

std::vector<std::uint64_t> PullLedger::agent_totals() const {
  std::vector<std::uint64_t> out(agents_, 0);
  for (const auto& r : rounds_) {
    if (!r) continue;
    for (std::size_t a = 0; a < agents_; ++a) out[a] += r->totals[a];
  }
  return out;
}

void PullLedger::write_transcript(std::ostream& out) const {
  for (std::size_t k = 0; k < rounds_.size(); ++k) {
    const Round* r = rounds_[k].get();
    for (std::size_t a = 0; a < agents_; ++a) {
      nlohmann::ordered_json j;
      j["round"] = k;
      j["agent"] = a;
      if (r) {
        auto first = r->counts.begin() + static_cast<std::ptrdiff_t>(a * arms_);
        j["pulls"] = std::vector<std::uint64_t>(
            first, first + static_cast<std::ptrdiff_t>(arms_));
        j["total"] = r->totals[a];
        if (!r->agent_rewards.empty()) {
          auto rw = r->agent_rewards.begin() + static_cast<std::ptrdiff_t>(a * arms_);
          j["rewards"] = std::vector<std::uint64_t>(
              rw, rw + static_cast<std::ptrdiff_t>(arms_));
        }
      } else {
        j["pulls"] = std::vector<std::uint64_t>(arms_, 0);
        j["total"] = 0;
      }
      out << j.dump() << '\n';
    }
  }
  // Pooled draws are only kept per arm, so close with the running sums.
  nlohmann::ordered_json tail;
  tail["arm_pulls"] = arm_pulls_;
  tail["arm_rewards"] = arm_reward_;
  out << tail.dump() << '\n';
}

Session::Session(Instance instance, CollabConfig config,
                 std::uint64_t master_seed, std::uint64_t trial)
    : instance_(std::move(instance)),
      config_(config),
      seed_(master_seed),
      trial_(trial),
      ledger_(config.agents, instance_.size(), config.horizon),
      coordinator_(master_seed, trial, kCoordinatorStream),
      pooled_(master_seed, trial, kPooledStream) {
  config_.validate();
  agent_rngs_.reserve(config_.agents);
  for (std::size_t a = 0; a < config_.agents; ++a) {
    agent_rngs_.emplace_back(master_seed, trial, a);
  }
}

void Session::advance() {
  if (cursor_ + 1 > config_.round_cap) {
    throw RoundCapExceeded("round cap of " +
                           std::to_string(config_.round_cap) + " exceeded");
  }
  ++cursor_;
  furthest_ = std::max(furthest_, cursor_);
}

void Session::rewind(std::size_t round) {
  if (round > furthest_) throw InvalidParams("cannot rewind past the future");
  cursor_ = round;
}

void ParallelBlock::next_copy() {
  furthest_ = std::max(furthest_, session_.round());
  session_.rewind(base_);
}

void ParallelBlock::finish() {
  furthest_ = std::max(furthest_, session_.round());
  session_.rewind(furthest_);
}

Exchange::Exchange(Session& session, std::uint64_t budget)
    : session_(session),
      budget_(budget),
      round_totals_(session.agents(), 0),
      scratch_(session.agents(), 0) {}

std::uint64_t Exchange::time_used() const { return completed_ + round_max_; }

void Exchange::reserve(std::span<const std::uint64_t> per_agent) {
  std::uint64_t new_max = round_max_;
  for (std::size_t a = 0; a < per_agent.size(); ++a) {
    new_max = std::max(new_max, round_totals_[a] + per_agent[a]);
  }
  if (completed_ + new_max > budget_) {
    throw BudgetExceeded("copy would exceed its declared budget");
  }
}

std::uint64_t Exchange::pull(std::size_t agent, ArmId arm,
                             std::uint64_t count) {
  if (count == 0) return 0;
  if (agent >= agents()) throw InvalidParams("agent index out of range");
  const std::uint64_t after = round_totals_[agent] + count;
  if (completed_ + std::max(round_max_, after) > budget_) {
    throw BudgetExceeded("copy would exceed its declared budget");
  }
  const std::uint64_t reward = draw_rewards(
      session_.agent_rng(agent), count, session_.instance().mean(arm));
  session_.ledger().record(session_.round(), agent, arm, count, reward);
  round_totals_[agent] = after;
  round_max_ = std::max(round_max_, after);
  if (slot_.empty()) slot_.assign(session_.instance().size(), 0);
  if (slot_[arm] == 0) {
    entries_.push_back({arm, 0, 0});
    slot_[arm] = static_cast<std::uint32_t>(entries_.size());
  }
  Entry& e = entries_[slot_[arm] - 1];
  e.pulls += count;
  e.reward += reward;
  return reward;
}

std::uint64_t Exchange::pull_all(ArmId arm, std::uint64_t per_agent) {
  if (per_agent == 0) return 0;
  if (completed_ + round_max_ + per_agent > budget_) {
    throw BudgetExceeded("copy would exceed its declared budget");
  }
  const std::uint64_t total = per_agent * agents();
  const std::uint64_t reward = draw_rewards(session_.pooled_rng(), total,
                                            session_.instance().mean(arm));
  session_.ledger().record_uniform(session_.round(), arm, per_agent, reward);
  for (auto& t : round_totals_) t += per_agent;
  round_max_ += per_agent;
  entries_.push_back({arm, total, reward});
  return reward;
}

std::uint64_t Exchange::pull_spread(ArmId arm, std::uint64_t total) {
  if (total == 0) return 0;
  const std::size_t k = agents();
  const std::uint64_t base = total / k;
  std::uint64_t extra = total % k;
  std::fill(scratch_.begin(), scratch_.end(), base);
  for (std::size_t a = spread_next_; extra > 0; a = (a + 1) % k, --extra) {
    ++scratch_[a];
    spread_next_ = (a + 1) % k;
  }
  reserve(scratch_);
  const std::uint64_t reward = draw_rewards(session_.pooled_rng(), total,
                                            session_.instance().mean(arm));
  session_.ledger().record_pooled(session_.round(), arm, scratch_, reward);
  for (std::size_t a = 0; a < k; ++a) {
    round_totals_[a] += scratch_[a];
    round_max_ = std::max(round_max_, round_totals_[a]);
  }
  entries_.push_back({arm, total, reward});
  return reward;
}

std::vector<ArmStat> Exchange::end_round() {
  if (!slot_.empty()) {
    for (const Entry& e : entries_) slot_[e.arm] = 0;
  }
  const auto by_arm = [](const Entry& a, const Entry& b) { return a.arm < b.arm; };
  if (!std::is_sorted(entries_.begin(), entries_.end(), by_arm)) {
    std::stable_sort(entries_.begin(), entries_.end(), by_arm);
  }
  std::vector<ArmStat> view;
  view.reserve(entries_.size());
  std::uint64_t reward = 0;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const Entry& e = entries_[i];
    if (view.empty() || view.back().arm != e.arm) {
      if (!view.empty()) {
        view.back().mean = static_cast<double>(reward) /
                           static_cast<double>(view.back().pulls);
      }
      view.push_back({e.arm, 0, 0.0});
      reward = 0;
    }
    view.back().pulls += e.pulls;
    reward += e.reward;
  }
  if (!view.empty()) {
    view.back().mean =
        static_cast<double>(reward) / static_cast<double>(view.back().pulls);
  }
  entries_.clear();
  completed_ += round_max_;
  round_max_ = 0;
  std::fill(round_totals_.begin(), round_totals_.end(), 0);
  spread_next_ = 0;
  session_.count_messages(view.size());
  session_.advance();
  return view;
}

}  // namespace collabtopm
