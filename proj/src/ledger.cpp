#include "chainlab/core/ledger.hpp"

#include <ostream>
#include <stdexcept>

#include "chainlab/core/hash.hpp"

namespace chainlab::core {

bool mvcc_validate(const Transaction& txn, const WorldState& state) {
  for (const auto& r : txn.read_set) {
    if (state.get_or_zero(r.key).version != r.version) return false;
  }
  return true;
}

bool mvcc_validate(const Transaction& txn, const Snapshot& snap) {
  for (const auto& r : txn.read_set) {
    if (snap.get_or_zero(r.key).version != r.version) return false;
  }
  return true;
}

Ledger::Ledger(WorldState genesis)
    : genesis_state_(genesis), state_(std::move(genesis)) {
  genesis_hash_ = genesis_state_.digest();
}

const Block& Ledger::block_at(uint64_t index) const {
  if (index == 0 || index > blocks_.size())
    throw std::out_of_range("block index out of range");
  return blocks_[index - 1];
}

Digest Ledger::tip_hash() const {
  return blocks_.empty() ? genesis_hash_ : blocks_.back().hash;
}

void Ledger::apply_block_writes(const Block& b) {
  for (const auto& t : b.txns) {
    if (t.validity != Validity::CommittedValid) continue;
    for (const auto& w : t.write_set) state_.put(w.key, w.value, b.index);
  }
  state_.set_height(b.index);
}

const Block& Ledger::commit(Block block) {
  if (block.index != state_.current_height() + 1)
    throw std::runtime_error("ledger corruption: non-contiguous block index");
  block.prev_hash = tip_hash();
  block.hash = hash_block(block);
  blocks_.push_back(std::move(block));
  apply_block_writes(blocks_.back());
  return blocks_.back();
}

bool Ledger::rollback_to(uint64_t height) {
  if (height > state_.current_height()) return false;
  if (height == state_.current_height()) return true;
  blocks_.resize(height);
  state_ = genesis_state_;
  for (const auto& b : blocks_) apply_block_writes(b);
  return true;
}

void Ledger::record_abort(Transaction txn, Validity v) {
  txn.validity = v;
  abort_log_.push_back(std::move(txn));
}

bool Ledger::verify_chain() const {
  Digest prev = genesis_hash_;
  uint64_t expect = 1;
  for (const auto& b : blocks_) {
    if (b.index != expect++) return false;
    if (b.prev_hash != prev) return false;
    if (b.hash != hash_block(b)) return false;
    prev = b.hash;
  }
  return true;
}

void Ledger::export_blocks(std::ostream& out) const {
  for (const auto& b : blocks_) {
    out << "{\"index\":" << b.index << ",\"hash\":\"" << to_hex(b.hash)
        << "\",\"episode\":" << b.episode << ",\"txns\":[";
    for (size_t i = 0; i < b.txns.size(); i++) {
      const auto& t = b.txns[i];
      if (i) out << ',';
      out << "{\"id\":" << t.id << ",\"kind\":\"" << to_string(t.kind)
          << "\",\"validity\":\"" << to_string(t.validity) << "\"}";
    }
    out << "]}\n";
  }
}

}  // namespace chainlab::core
