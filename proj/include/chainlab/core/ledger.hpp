#pragma once

#include <iosfwd>
#include <vector>

#include "chainlab/core/types.hpp"
#include "chainlab/core/world_state.hpp"

namespace chainlab::core {

// Commit-time MVCC check: valid iff every read version still matches the
// current committed version. Unknown keys count as version 0, so a nonzero
// recorded version on a missing key is stale by definition.
bool mvcc_validate(const Transaction& txn, const WorldState& state);
bool mvcc_validate(const Transaction& txn, const Snapshot& snap);

// Hash-chained ledger plus the world state produced by its committed-valid
// transactions. Aborted transactions that never reach a block (episode
// boundary backpressure, episode-tag mismatches) are kept in a side log so
// every ordered transaction has exactly one recorded validity.
class Ledger {
 public:
  explicit Ledger(WorldState genesis);

  const WorldState& state() const { return state_; }
  WorldState& mutable_state() { return state_; }
  uint64_t height() const { return state_.current_height(); }
  const Digest& genesis_hash() const { return genesis_hash_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  const Block& block_at(uint64_t index) const;  // 1-based height

  Digest tip_hash() const;

  // Seals `block` (sets prev_hash/hash from the chain tip), applies the
  // writes of its committed-valid transactions with version = block.index,
  // and appends it. Throws on a non-contiguous index.
  const Block& commit(Block block);

  // Truncates to `height` and rebuilds the state by replaying the recorded
  // writes from genesis. Returns false (no-op) if height > current height.
  bool rollback_to(uint64_t height);

  void record_abort(Transaction txn, Validity v);
  const std::vector<Transaction>& abort_log() const { return abort_log_; }

  bool verify_chain() const;

  // Newline-delimited structured records, one per block.
  void export_blocks(std::ostream& out) const;

 private:
  void apply_block_writes(const Block& b);

  WorldState genesis_state_;
  Digest genesis_hash_{};
  WorldState state_;
  std::vector<Block> blocks_;
  std::vector<Transaction> abort_log_;
};

}  // namespace chainlab::core
