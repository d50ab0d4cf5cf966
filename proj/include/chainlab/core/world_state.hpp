#pragma once

#include <memory>
#include <optional>
#include <unordered_map>

#include "chainlab/core/types.hpp"

namespace chainlab::core {

struct VersionedValue {
  int64_t value = 0;
  uint64_t version = 0;  // block index of the last committing write
};

using StateMap = std::unordered_map<Key, VersionedValue>;

// Immutable point-in-time view. Reads never observe writes from blocks
// committed after `height`.
class Snapshot {
 public:
  Snapshot() = default;
  Snapshot(uint64_t height, std::shared_ptr<const StateMap> state)
      : height_(height), state_(std::move(state)) {}

  uint64_t height() const { return height_; }
  std::optional<VersionedValue> get(Key k) const;
  // Missing keys read as (0, version 0).
  VersionedValue get_or_zero(Key k) const;

 private:
  uint64_t height_ = 0;
  std::shared_ptr<const StateMap> state_;
};

// Versioned key-value world state. Mutation is confined to the ledger
// writer; snapshots share the backing map copy-on-write.
class WorldState {
 public:
  WorldState();

  uint64_t current_height() const { return height_; }
  std::optional<VersionedValue> get(Key k) const;
  VersionedValue get_or_zero(Key k) const;
  size_t key_count() const { return map_->size(); }

  // Preload writes carry version 0 (genesis).
  void preload(Key k, int64_t value);

  void put(Key k, int64_t value, uint64_t version);
  void set_height(uint64_t h) { height_ = h; }

  Snapshot snapshot() const { return Snapshot(height_, map_); }

  // Deterministic digest over the sorted key set, used for the genesis hash
  // and cross-peer state comparison.
  Digest digest() const;

  bool same_contents(const WorldState& other) const;

 private:
  void ensure_unique();
  std::shared_ptr<StateMap> map_;
  uint64_t height_ = 0;
};

}  // namespace chainlab::core
