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

#ifndef COLLABTOPM_COLLAB_HPP_
#define COLLABTOPM_COLLAB_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "collabtopm/instance.hpp"
#include "collabtopm/rng.hpp"

namespace collabtopm {

struct CollabConfig {
  std::size_t agents = 1;    // K
  std::uint64_t horizon = 1; // T, pulls per agent
  std::size_t round_cap = 1;

  void validate() const;
};

inline constexpr std::uint64_t kUnlimitedHorizon = UINT64_MAX;

// (x_i, theta~_i) pair broadcast at a round boundary.
struct ArmStat {
  ArmId arm = 0;
  std::uint64_t pulls = 0;
  double mean = 0.0;
};

// Dense per-round accounting. A round's storage is allocated the first time
// something is recorded in it.
class PullLedger {
 public:
  PullLedger(std::size_t agents, std::size_t arms, std::uint64_t horizon);

  // Pulls drawn on one agent's own stream.
  void record(std::size_t round, std::size_t agent, ArmId arm,
              std::uint64_t pulls, std::uint64_t reward);
  // Same count for every agent, one reward sum for all of them.
  void record_uniform(std::size_t round, ArmId arm, std::uint64_t per_agent,
                      std::uint64_t reward);
  // Pulls per agent with a single reward sum drawn for all of them.
  void record_pooled(std::size_t round, ArmId arm,
                     std::span<const std::uint64_t> per_agent,
                     std::uint64_t reward);

  std::size_t agents() const { return agents_; }
  std::size_t arms() const { return arms_; }
  std::uint64_t horizon() const { return horizon_; }
  std::size_t rounds() const { return rounds_.size(); }

  // Sum over rounds of the busiest agent's pulls.
  std::uint64_t time_used() const { return time_; }
  std::uint64_t round_max(std::size_t round) const;
  std::uint64_t round_agent_total(std::size_t round, std::size_t agent) const;
  std::uint64_t cell_pulls(std::size_t round, std::size_t agent,
                           ArmId arm) const;
  // Reward sum of individually drawn pulls only.
  std::uint64_t cell_individual_reward(std::size_t round, std::size_t agent,
                                       ArmId arm) const;

  std::uint64_t arm_pulls(ArmId arm) const { return arm_pulls_[arm]; }
  std::uint64_t arm_reward(ArmId arm) const { return arm_reward_[arm]; }
  ArmStat merged(ArmId arm) const;
  std::vector<std::uint64_t> agent_totals() const;

  // One JSON object per (round, agent), then one line of per-arm sums.
  void write_transcript(std::ostream& out) const;

 private:
  struct Round {
    std::vector<std::uint64_t> counts;         // agent-major
    std::vector<std::uint64_t> agent_rewards;  // lazily sized like counts
    std::vector<std::uint64_t> totals;
    std::uint64_t max = 0;
  };

  Round& round_at(std::size_t round);
  const Round* find(std::size_t round) const;
  void charge(Round& r, std::size_t agent, std::uint64_t pulls);
  void check_arm(ArmId arm) const;

  std::size_t agents_;
  std::size_t arms_;
  std::uint64_t horizon_;
  std::uint64_t time_ = 0;
  std::vector<std::unique_ptr<Round>> rounds_;
  std::vector<std::uint64_t> arm_pulls_;
  std::vector<std::uint64_t> arm_reward_;
};

// One trial: ground truth, RNG streams, the ledger and the round cursor.
class Session {
 public:
  Session(Instance instance, CollabConfig config, std::uint64_t master_seed,
          std::uint64_t trial);

  const Instance& instance() const { return instance_; }
  const CollabConfig& config() const { return config_; }
  std::size_t agents() const { return config_.agents; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t trial() const { return trial_; }

  PullLedger& ledger() { return ledger_; }
  const PullLedger& ledger() const { return ledger_; }

  CounterRng& agent_rng(std::size_t agent) { return agent_rngs_[agent]; }
  CounterRng& coordinator_rng() { return coordinator_; }
  CounterRng& pooled_rng() { return pooled_; }

  std::size_t round() const { return cursor_; }
  // Close the current round; throws RoundCapExceeded past the cap.
  void advance();
  // Move the cursor back to an earlier round (parallel composition).
  void rewind(std::size_t round);

  std::size_t rounds_used() const { return furthest_; }
  std::uint64_t time_used() const { return ledger_.time_used(); }
  std::uint64_t messages() const { return messages_; }
  void count_messages(std::uint64_t stats) { messages_ += stats; }

 private:
  Instance instance_;
  CollabConfig config_;
  std::uint64_t seed_;
  std::uint64_t trial_;
  PullLedger ledger_;
  std::vector<CounterRng> agent_rngs_;
  CounterRng coordinator_;
  CounterRng pooled_;
  std::size_t cursor_ = 0;
  std::size_t furthest_ = 0;
  std::uint64_t messages_ = 0;
};

// Runs several sub-algorithms over the same rounds. Each copy starts at the
// round where the block opened; afterwards the cursor sits at the furthest
// round any copy reached.
class ParallelBlock {
 public:
  explicit ParallelBlock(Session& session)
      : session_(session), base_(session.round()), furthest_(base_) {}

  void next_copy();
  void finish();

 private:
  Session& session_;
  std::size_t base_;
  std::size_t furthest_;
};

// One algorithm copy's channel to the agents. Tracks the copy's own time
// against the budget it was granted.
class Exchange {
 public:
  Exchange(Session& session, std::uint64_t budget);

  Session& session() { return session_; }
  std::size_t agents() const { return session_.agents(); }
  std::uint64_t budget() const { return budget_; }
  std::uint64_t time_used() const;

  // Agent-local draws.
  std::uint64_t pull(std::size_t agent, ArmId arm, std::uint64_t count);
  // Every agent pulls `per_agent` times.
  std::uint64_t pull_all(ArmId arm, std::uint64_t per_agent);
  // `total` pulls dealt round-robin, continuing where the previous spread in
  // this round stopped.
  std::uint64_t pull_spread(ArmId arm, std::uint64_t total);

  bool round_empty() const { return entries_.empty(); }
  // Merged stats of this round's pulls, sorted by arm.
  std::vector<ArmStat> end_round();

 private:
  struct Entry {
    ArmId arm;
    std::uint64_t pulls;
    std::uint64_t reward;
  };

  void reserve(std::span<const std::uint64_t> per_agent);

  Session& session_;
  std::uint64_t budget_;
  std::uint64_t completed_ = 0;
  std::vector<std::uint64_t> round_totals_;
  std::uint64_t round_max_ = 0;
  std::size_t spread_next_ = 0;
  std::vector<std::uint64_t> scratch_;
  std::vector<Entry> entries_;
  // 1 + index into entries_ of an arm's individual-pull entry; lazily sized.
  std::vector<std::uint32_t> slot_;
};

struct ExperimentReport {
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  std::vector<ArmId> returned;
  std::size_t rounds_used = 0;
  std::uint64_t time_used = 0;
  std::vector<std::uint64_t> agent_totals;
  bool correct = false;
  bool fallback = false;
  std::string error;
};

}  // namespace collabtopm

#endif  // COLLABTOPM_COLLAB_HPP_
