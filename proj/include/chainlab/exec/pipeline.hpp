#pragma once

#include <vector>

#include "chainlab/core/ledger.hpp"
#include "chainlab/core/types.hpp"
#include "chainlab/core/world_state.hpp"
#include "chainlab/exec/action_space.hpp"
#include "chainlab/exec/dep_graph.hpp"

namespace chainlab::exec {

// Simulated-time cost model for block formation. All knobs are integral
// (ns where sub-microsecond resolution matters) so durations stay exact.
struct CostModel {
  TimeUs block_overhead = 100;       // hashing + commit, per block
  TimeUs ordering_per_txn = 50;      // ordering-service work (serialize, verify,
                                     // replicate), per ordered txn
  TimeUs validation_per_txn = 5;     // MVCC check
  int64_t pair_check_ns = 200;       // dependency-graph pairwise conflict check
  TimeUs per_cycle = 5;              // Johnson enumeration, per elementary cycle
  uint64_t cycle_cap = 1'000'000;    // safety valve for cycle enumeration
  uint32_t workers = 8;              // simulated cores per peer

  TimeUs graph_build_cost(size_t txn_count) const;
};

struct ExecutionOutcome {
  TimeUs duration = 0;  // simulated wall time of block formation
  uint32_t valid = 0;
  uint32_t invalidated = 0;
  uint32_t early_aborted = 0;
  uint64_t cycles_enumerated = 0;
  bool cycle_cap_hit = false;

  uint32_t total() const { return valid + invalidated + early_aborted; }
};

// Critical-path makespan of list-scheduling per-txn delays over `workers`
// simulated cores, respecting graph edges. Nodes are released in index order.
TimeUs makespan(const std::vector<TimeUs>& delays, const DependencyGraph& g,
                uint32_t workers);

// Early (speculative) execution against a snapshot: records (key, version)
// reads, buffers writes, consumes compute_delay. Nothing is applied.
void simulate_txn(core::Transaction& t, const core::Snapshot& snap);

// XOV++ early abort: abort iff any recorded read version is already stale
// against the committed state.
bool reads_still_fresh(const core::Transaction& t, const core::WorldState& state);

struct BlockResult {
  core::Block block;  // prev_hash/hash left for the ledger to seal
  ExecutionOutcome outcome;
};

// Dispatch over the OX / OXII / XOV / XOV+reorder semantics. Every input
// transaction appears in the returned block with a final validity flag.
// `state` is the committed pre-block state and is not modified.
BlockResult process_block(const ArchitectureConfig& cfg,
                          std::vector<core::Transaction> txns,
                          const core::WorldState& state, uint64_t block_index,
                          uint64_t episode, const CostModel& costs);

}  // namespace chainlab::exec
