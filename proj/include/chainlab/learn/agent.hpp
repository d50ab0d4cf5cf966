#pragma once

#include <cstdint>
#include <vector>

#include "chainlab/common.hpp"
#include "chainlab/core/types.hpp"
#include "chainlab/exec/action_space.hpp"
#include "chainlab/learn/forest.hpp"
#include "chainlab/proto/messages.hpp"

namespace chainlab::learn {

// Workload measurement over a closed window of committed blocks.
// write_ratio: share of transactions with write intent. hot_key_ratio:
// accesses to the most-touched key over all key accesses (a transaction
// accesses a key iff it appears in its read or write set). arrival_rate:
// txns per second over the submission timestamp span (floor 1 ms).
// exec_delay_ms: mean consumed compute per transaction.
proto::Features featurize(const std::vector<const core::Block*>& window);

struct ExperienceEntry {
  uint64_t episode = 0;
  proto::Features state;
  exec::ArchitectureConfig action;
  double reward = 0;  // agreed throughput, txns per second
};

struct AgentTimings {
  TimeUs featurize_wall = 0;
  TimeUs train_wall = 0;
  TimeUs infer_wall = 0;
};

// Contextual bandit over the 100 architecture actions. Exploration is
// Thompson sampling by bootstrap: each selection resamples the experience
// with replacement (seeded by episode) and fits a fresh forest, so model
// uncertainty shrinks as evidence accumulates. With no experience the
// choice is uniform at random from a seed shared by all peers.
class Agent {
 public:
  Agent(uint64_t run_seed, ForestParams params = {});

  // Idempotent per episode; replays after a view change are dropped.
  void record(uint64_t episode, const proto::Features& state,
              const exec::ArchitectureConfig& action, double reward);

  exec::ArchitectureConfig select(const proto::Features& state,
                                  uint64_t next_episode,
                                  AgentTimings* timings = nullptr);

  // Mean prediction of the current-evidence model (no bootstrap), used for
  // regret accounting and tests.
  double predict(const proto::Features& state,
                 const exec::ArchitectureConfig& action, uint64_t episode) const;

  const std::vector<ExperienceEntry>& experience() const { return experience_; }

  static FeatureVec encode(const proto::Features& s,
                           const exec::ArchitectureConfig& a);

 private:
  uint64_t run_seed_;
  ForestParams params_;
  std::vector<ExperienceEntry> experience_;
  std::vector<exec::ArchitectureConfig> actions_;
};

}  // namespace chainlab::learn
