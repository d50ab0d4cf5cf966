#include "chainlab/exec/pipeline.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>
#include <unordered_map>

#include "chainlab/workload/smallbank.hpp"

namespace chainlab::exec {

using core::ReadEntry;
using core::Transaction;
using core::Validity;
using core::VersionedValue;
using core::WorldState;

TimeUs CostModel::graph_build_cost(size_t n) const {
  if (n < 2) return 0;
  int64_t pairs = static_cast<int64_t>(n) * static_cast<int64_t>(n - 1) / 2;
  return pairs * pair_check_ns / 1000;
}

TimeUs makespan(const std::vector<TimeUs>& delays, const DependencyGraph& g,
                uint32_t workers) {
  if (workers == 0) throw std::invalid_argument("workers must be >= 1");
  const int n = static_cast<int>(delays.size());
  std::vector<TimeUs> finish(n, 0);
  std::vector<std::vector<int>> preds(n);
  for (int v = 0; v < n; v++)
    for (int s : g.adj[v]) preds[s].push_back(v);
  std::priority_queue<TimeUs, std::vector<TimeUs>, std::greater<>> free_at;
  for (uint32_t w = 0; w < workers; w++) free_at.push(0);
  std::vector<char> alive(n, 1);
  for (int u : topo_order(g, alive)) {
    TimeUs ready = 0;
    for (int v : preds[u]) ready = std::max(ready, finish[v]);
    TimeUs worker_free = free_at.top();
    free_at.pop();
    TimeUs start = std::max(ready, worker_free);
    finish[u] = start + delays[u];
    free_at.push(finish[u]);
  }
  TimeUs end = 0;
  for (int i = 0; i < n; i++) end = std::max(end, finish[i]);
  return end;
}

namespace {

// Uncommitted view over the pre-block state, used for in-block reads and
// sequential MVCC validation.
class Overlay {
 public:
  Overlay(const WorldState& state, uint64_t block_index)
      : state_(state), block_index_(block_index) {}

  VersionedValue read(Key k) const {
    auto it = map_.find(k);
    if (it != map_.end()) return it->second;
    return state_.get_or_zero(k);
  }

  void write(Key k, int64_t value) {
    map_[k] = VersionedValue{value, block_index_};
  }

 private:
  const WorldState& state_;
  uint64_t block_index_;
  std::unordered_map<Key, VersionedValue> map_;
};

// Executes a transaction's semantics against the overlay, recording the
// read versions it saw and buffering the writes into the overlay.
void execute_against(Transaction& t, Overlay& overlay) {
  t.read_set.clear();
  for (Key k : core::declared_reads(t)) {
    auto vv = overlay.read(k);
    t.read_set.push_back(ReadEntry{k, vv.version});
  }
  t.write_set = workload::compute_writes(
      t, [&](Key k) { return overlay.read(k).value; });
  for (const auto& w : t.write_set) overlay.write(w.key, w.value);
  t.measured_delay = t.compute_delay;
}

bool validate_against(const Transaction& t, const Overlay& overlay) {
  for (const auto& r : t.read_set)
    if (overlay.read(r.key).version != r.version) return false;
  return true;
}

}  // namespace

void simulate_txn(Transaction& t, const core::Snapshot& snap) {
  t.read_set.clear();
  for (Key k : core::declared_reads(t)) {
    auto vv = snap.get_or_zero(k);
    t.read_set.push_back(ReadEntry{k, vv.version});
  }
  t.write_set = workload::compute_writes(
      t, [&](Key k) { return snap.get_or_zero(k).value; });
  t.measured_delay = t.compute_delay;
  t.simulated = true;
}

bool reads_still_fresh(const Transaction& t, const WorldState& state) {
  for (const auto& r : t.read_set)
    if (state.get_or_zero(r.key).version != r.version) return false;
  return true;
}

namespace {

BlockResult run_ordered_execute(const ArchitectureConfig& cfg,
                                std::vector<Transaction> txns,
                                const WorldState& state, uint64_t block_index,
                                uint64_t episode, const CostModel& costs) {
  BlockResult res;
  Overlay overlay(state, block_index);
  TimeUs exec_total = 0;
  std::vector<TimeUs> delays;
  delays.reserve(txns.size());
  for (auto& t : txns) {
    execute_against(t, overlay);
    t.validity = Validity::CommittedValid;
    exec_total += t.compute_delay;
    delays.push_back(t.compute_delay);
    res.outcome.valid++;
  }
  if (cfg.dep_graph) {
    // OXII: graph-parallel execution; identical post-state, shorter span.
    auto graph = build_dependency_graph(txns, GraphMode::Oxii);
    res.outcome.duration = costs.graph_build_cost(txns.size()) +
                           makespan(delays, graph, costs.workers);
  } else {
    res.outcome.duration = exec_total;
  }
  res.outcome.duration +=
      costs.block_overhead +
      static_cast<TimeUs>(txns.size()) * costs.ordering_per_txn;
  res.block.index = block_index;
  res.block.episode = episode;
  res.block.txns = std::move(txns);
  return res;
}

BlockResult run_execute_order_validate(const ArchitectureConfig& cfg,
                                       std::vector<Transaction> txns,
                                       const WorldState& state,
                                       uint64_t block_index, uint64_t episode,
                                       const CostModel& costs) {
  BlockResult res;
  TimeUs duration = costs.block_overhead +
                    static_cast<TimeUs>(txns.size()) * costs.ordering_per_txn;

  // Stragglers ordered under a non-XOV episode arrive unsimulated; simulate
  // them now against the pre-block state on the worker pool, charging the
  // parallel makespan (greedy earliest-free worker, like the entry lanes).
  core::Snapshot snap = state.snapshot();
  std::vector<TimeUs> worker_free(std::max<uint32_t>(costs.workers, 1), 0);
  TimeUs sim_makespan = 0;
  for (auto& t : txns) {
    if (!t.simulated) {
      simulate_txn(t, snap);
      auto it = std::min_element(worker_free.begin(), worker_free.end());
      *it += t.compute_delay;
      sim_makespan = std::max(sim_makespan, *it);
    }
  }
  duration += sim_makespan;

  // Simulation-time early aborts arrive pre-marked from the entry peer.
  std::vector<int> candidates;
  for (size_t i = 0; i < txns.size(); i++) {
    if (txns[i].validity == Validity::EarlyAborted)
      res.outcome.early_aborted++;
    else
      candidates.push_back(static_cast<int>(i));
  }

  std::vector<int> schedule;  // indices into txns, validation order
  if (cfg.is_reorder()) {
    // Block-cut early abort before graph construction: stale reads are
    // already dead and would only add cycles.
    std::vector<int> live;
    for (int i : candidates) {
      if (!reads_still_fresh(txns[i], state)) {
        txns[i].validity = Validity::EarlyAborted;
        res.outcome.early_aborted++;
      } else {
        live.push_back(i);
      }
    }
    std::vector<Transaction> live_txns;
    live_txns.reserve(live.size());
    for (int i : live) live_txns.push_back(txns[i]);
    auto graph = build_dependency_graph(live_txns, GraphMode::Reorder);
    duration += costs.graph_build_cost(live_txns.size());
    auto reorder = abort_cycles_and_reorder(graph, costs.cycle_cap);
    res.outcome.cycles_enumerated = reorder.cycles_enumerated;
    res.outcome.cycle_cap_hit = reorder.cap_hit;
    duration += static_cast<TimeUs>(reorder.cycles_enumerated) * costs.per_cycle;
    for (int a : reorder.aborted) {
      txns[live[a]].validity = Validity::EarlyAborted;
      res.outcome.early_aborted++;
    }
    for (int s : reorder.schedule) schedule.push_back(live[s]);
  } else {
    schedule = candidates;
  }

  // Sequential MVCC validation in schedule order; committed writes update
  // the in-block version overlay so later conflicting reads invalidate.
  Overlay overlay(state, block_index);
  std::vector<char> scheduled(txns.size(), 0);
  for (int i : schedule) {
    auto& t = txns[i];
    duration += costs.validation_per_txn;
    if (validate_against(t, overlay)) {
      t.validity = Validity::CommittedValid;
      for (const auto& w : t.write_set) overlay.write(w.key, w.value);
      res.outcome.valid++;
    } else {
      t.validity = Validity::Invalidated;
      res.outcome.invalidated++;
    }
    scheduled[i] = 1;
  }

  // Block order: validation schedule first, then aborted txns by original
  // position. Keeps commit order equal to the order validation saw.
  std::vector<Transaction> ordered;
  ordered.reserve(txns.size());
  for (int i : schedule) ordered.push_back(std::move(txns[i]));
  for (size_t i = 0; i < txns.size(); i++) {
    if (!scheduled[i]) ordered.push_back(std::move(txns[i]));
  }

  res.outcome.duration = duration;
  res.block.index = block_index;
  res.block.episode = episode;
  res.block.txns = std::move(ordered);
  return res;
}

}  // namespace

BlockResult process_block(const ArchitectureConfig& cfg,
                          std::vector<Transaction> txns,
                          const WorldState& state, uint64_t block_index,
                          uint64_t episode, const CostModel& costs) {
  if (txns.size() > cfg.block_size)
    throw std::invalid_argument("batch exceeds block size");
  if (!cfg.early_execution)
    return run_ordered_execute(cfg, std::move(txns), state, block_index,
                               episode, costs);
  return run_execute_order_validate(cfg, std::move(txns), state, block_index,
                                    episode, costs);
}

}  // namespace chainlab::exec
