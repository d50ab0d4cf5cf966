#include "chainlab/core/world_state.hpp"

#include <algorithm>
#include <vector>

#include "chainlab/core/hash.hpp"

namespace chainlab::core {

std::optional<VersionedValue> Snapshot::get(Key k) const {
  if (!state_) return std::nullopt;
  auto it = state_->find(k);
  if (it == state_->end()) return std::nullopt;
  return it->second;
}

VersionedValue Snapshot::get_or_zero(Key k) const {
  auto v = get(k);
  return v ? *v : VersionedValue{};
}

WorldState::WorldState() : map_(std::make_shared<StateMap>()) {}

std::optional<VersionedValue> WorldState::get(Key k) const {
  auto it = map_->find(k);
  if (it == map_->end()) return std::nullopt;
  return it->second;
}

VersionedValue WorldState::get_or_zero(Key k) const {
  auto v = get(k);
  return v ? *v : VersionedValue{};
}

void WorldState::ensure_unique() {
  if (map_.use_count() > 1) map_ = std::make_shared<StateMap>(*map_);
}

void WorldState::preload(Key k, int64_t value) {
  ensure_unique();
  (*map_)[k] = VersionedValue{value, 0};
}

void WorldState::put(Key k, int64_t value, uint64_t version) {
  ensure_unique();
  (*map_)[k] = VersionedValue{value, version};
}

Digest WorldState::digest() const {
  std::vector<std::pair<Key, VersionedValue>> entries(map_->begin(), map_->end());
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  ByteWriter w;
  w.u64(height_);
  w.u64(entries.size());
  for (const auto& [k, vv] : entries) {
    w.u64(k);
    w.i64(vv.value);
    w.u64(vv.version);
  }
  return sha256(w.data());
}

bool WorldState::same_contents(const WorldState& other) const {
  if (map_->size() != other.map_->size()) return false;
  for (const auto& [k, vv] : *map_) {
    auto o = other.get(k);
    if (!o || o->value != vv.value || o->version != vv.version) return false;
  }
  return true;
}

}  // namespace chainlab::core
