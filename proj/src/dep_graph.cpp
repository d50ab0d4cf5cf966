#include "chainlab/exec/dep_graph.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace chainlab::exec {

using core::Transaction;

size_t DependencyGraph::edge_count() const {
  size_t n = 0;
  for (const auto& e : adj) n += e.size();
  return n;
}

namespace {

struct Footprint {
  std::vector<Key> reads;
  std::vector<Key> writes;
};

Footprint footprint(const Transaction& t, GraphMode mode) {
  Footprint f;
  if (mode == GraphMode::Oxii) {
    f.reads = core::declared_reads(t);
    f.writes = core::declared_writes(t);
  } else {
    for (const auto& r : t.read_set) f.reads.push_back(r.key);
    for (const auto& w : t.write_set) f.writes.push_back(w.key);
  }
  return f;
}

}  // namespace

DependencyGraph build_dependency_graph(const std::vector<Transaction>& txns,
                                       GraphMode mode) {
  const int n = static_cast<int>(txns.size());
  DependencyGraph g;
  g.mode = mode;
  g.adj.assign(n, {});
  g.txn_ids.reserve(n);
  for (const auto& t : txns) g.txn_ids.push_back(t.id);

  std::vector<Footprint> fp;
  fp.reserve(n);
  for (const auto& t : txns) fp.push_back(footprint(t, mode));

  std::unordered_map<Key, std::vector<int>> readers, writers;
  for (int i = 0; i < n; i++) {
    for (Key k : fp[i].reads) readers[k].push_back(i);
    for (Key k : fp[i].writes) writers[k].push_back(i);
  }

  std::vector<std::unordered_set<int>> succ(n);
  if (mode == GraphMode::Oxii) {
    // i -> j for i < j on WR, RW, or WW conflicts.
    for (const auto& [k, ws] : writers) {
      auto rit = readers.find(k);
      for (int w : ws) {
        if (rit != readers.end()) {
          for (int r : rit->second) {
            if (w < r) succ[w].insert(r);        // WR
            else if (r < w) succ[r].insert(w);   // RW
          }
        }
        for (int w2 : ws)
          if (w < w2) succ[w].insert(w2);        // WW
      }
    }
  } else {
    // Reader -> writer on RW conflicts, any relative order.
    for (const auto& [k, ws] : writers) {
      auto rit = readers.find(k);
      if (rit == readers.end()) continue;
      for (int r : rit->second)
        for (int w : ws)
          if (r != w) succ[r].insert(w);
    }
  }

  for (int i = 0; i < n; i++) {
    g.adj[i].assign(succ[i].begin(), succ[i].end());
    std::sort(g.adj[i].begin(), g.adj[i].end());
  }
  return g;
}

std::vector<int> topo_order(const DependencyGraph& g,
                            const std::vector<char>& alive) {
  const int n = static_cast<int>(g.size());
  std::vector<int> indeg(n, 0);
  for (int i = 0; i < n; i++) {
    if (!alive[i]) continue;
    for (int j : g.adj[i])
      if (alive[j]) indeg[j]++;
  }
  // Min-position-first Kahn; a plain sorted scan keeps it deterministic.
  std::vector<int> ready;
  for (int i = 0; i < n; i++)
    if (alive[i] && indeg[i] == 0) ready.push_back(i);
  std::vector<int> order;
  while (!ready.empty()) {
    auto it = std::min_element(ready.begin(), ready.end());
    int u = *it;
    ready.erase(it);
    order.push_back(u);
    for (int v : g.adj[u]) {
      if (alive[v] && --indeg[v] == 0) ready.push_back(v);
    }
  }
  size_t alive_count = 0;
  for (int i = 0; i < n; i++) alive_count += alive[i] ? 1 : 0;
  if (order.size() != alive_count)
    throw std::runtime_error("topological order requested on a cyclic graph");
  return order;
}

bool is_acyclic(const DependencyGraph& g) {
  std::vector<char> alive(g.size(), 1);
  try {
    topo_order(g, alive);
    return true;
  } catch (const std::runtime_error&) {
    return false;
  }
}

namespace {

// Tarjan SCC over the subgraph of alive nodes with index >= min_node.
class SccFinder {
 public:
  SccFinder(const DependencyGraph& g, const std::vector<char>& alive,
            int min_node)
      : g_(g), alive_(alive), min_(min_node) {
    const int n = static_cast<int>(g.size());
    index_.assign(n, -1);
    low_.assign(n, 0);
    on_stack_.assign(n, 0);
    comp_.assign(n, -1);
    for (int v = min_; v < n; v++)
      if (alive_[v] && index_[v] < 0) strong_connect(v);
  }

  int component(int v) const { return comp_[v]; }
  const std::vector<std::vector<int>>& components() const { return comps_; }

 private:
  void strong_connect(int v) {
    index_[v] = low_[v] = counter_++;
    stack_.push_back(v);
    on_stack_[v] = 1;
    for (int w : g_.adj[v]) {
      if (w < min_ || !alive_[w]) continue;
      if (index_[w] < 0) {
        strong_connect(w);
        low_[v] = std::min(low_[v], low_[w]);
      } else if (on_stack_[w]) {
        low_[v] = std::min(low_[v], index_[w]);
      }
    }
    if (low_[v] == index_[v]) {
      comps_.emplace_back();
      int w;
      do {
        w = stack_.back();
        stack_.pop_back();
        on_stack_[w] = 0;
        comp_[w] = static_cast<int>(comps_.size()) - 1;
        comps_.back().push_back(w);
      } while (w != v);
    }
  }

  const DependencyGraph& g_;
  const std::vector<char>& alive_;
  int min_;
  int counter_ = 0;
  std::vector<int> index_, low_, comp_;
  std::vector<char> on_stack_;
  std::vector<int> stack_;
  std::vector<std::vector<int>> comps_;
};

// Johnson's elementary-circuit enumeration. Collects cycles (as node lists)
// until `cap` is reached.
class CycleEnumerator {
 public:
  CycleEnumerator(const DependencyGraph& g, uint64_t cap) : g_(g), cap_(cap) {}

  // Returns false when the cap was hit.
  bool run(std::vector<std::vector<int>>* cycles) {
    const int n = static_cast<int>(g_.size());
    cycles_ = cycles;
    blocked_.assign(n, 0);
    block_map_.assign(n, {});
    std::vector<char> alive(n, 1);
    for (int s = 0; s < n && !capped_; s++) {
      SccFinder scc(g_, alive, s);
      int c = scc.component(s);
      if (c < 0 || scc.components()[c].size() < 2) continue;
      scc_comp_ = &scc;
      root_comp_ = c;
      start_ = s;
      for (int v : scc.components()[c]) {
        blocked_[v] = 0;
        block_map_[v].clear();
      }
      circuit(s);
      // Nodes < s+1 are excluded from later roots via the min-node bound.
    }
    return !capped_;
  }

 private:
  bool in_root_scc(int v) const {
    return v >= start_ && scc_comp_->component(v) == root_comp_;
  }

  bool circuit(int v) {
    if (capped_) return true;
    bool found = false;
    path_.push_back(v);
    blocked_[v] = 1;
    for (int w : g_.adj[v]) {
      if (!in_root_scc(w)) continue;
      if (w == start_) {
        cycles_->push_back(path_);
        found = true;
        if (cycles_->size() >= cap_) {
          capped_ = true;
          break;
        }
      } else if (!blocked_[w]) {
        if (circuit(w)) found = true;
        if (capped_) break;
      }
    }
    if (found) {
      unblock(v);
    } else {
      for (int w : g_.adj[v]) {
        if (!in_root_scc(w)) continue;
        auto& bm = block_map_[w];
        if (std::find(bm.begin(), bm.end(), v) == bm.end()) bm.push_back(v);
      }
    }
    path_.pop_back();
    return found;
  }

  void unblock(int v) {
    blocked_[v] = 0;
    auto pending = std::move(block_map_[v]);
    block_map_[v].clear();
    for (int w : pending)
      if (blocked_[w]) unblock(w);
  }

  const DependencyGraph& g_;
  uint64_t cap_;
  std::vector<std::vector<int>>* cycles_ = nullptr;
  std::vector<char> blocked_;
  std::vector<std::vector<int>> block_map_;
  std::vector<int> path_;
  SccFinder* scc_comp_ = nullptr;
  int root_comp_ = -1;
  int start_ = 0;
  bool capped_ = false;
};

}  // namespace

ReorderResult abort_cycles_and_reorder(const DependencyGraph& g,
                                       uint64_t cycle_cap) {
  const int n = static_cast<int>(g.size());
  ReorderResult res;
  std::vector<char> alive(n, 1);

  std::vector<std::vector<int>> cycles;
  CycleEnumerator enumerator(g, cycle_cap);
  bool complete = enumerator.run(&cycles);
  res.cycles_enumerated = cycles.size();
  res.cap_hit = !complete;

  if (!complete) {
    // Safety valve: abort every member of a nontrivial SCC (exactly the
    // nodes on some cycle) without finishing the enumeration.
    SccFinder scc(g, alive, 0);
    for (const auto& comp : scc.components()) {
      if (comp.size() < 2) continue;
      for (int v : comp) alive[v] = 0;
    }
  } else if (!cycles.empty()) {
    std::vector<uint64_t> count(n, 0);
    std::vector<char> cycle_alive(cycles.size(), 1);
    for (const auto& c : cycles)
      for (int v : c) count[v]++;
    uint64_t remaining = cycles.size();
    while (remaining > 0) {
      int best = -1;
      for (int v = 0; v < n; v++) {
        if (count[v] == 0) continue;
        if (best < 0 || count[v] > count[best] ||
            (count[v] == count[best] && g.txn_ids[v] < g.txn_ids[best]))
          best = v;
      }
      alive[best] = 0;
      for (size_t ci = 0; ci < cycles.size(); ci++) {
        if (!cycle_alive[ci]) continue;
        const auto& c = cycles[ci];
        if (std::find(c.begin(), c.end(), best) == c.end()) continue;
        cycle_alive[ci] = 0;
        remaining--;
        for (int v : c) count[v]--;
      }
    }
  }

  for (int v = 0; v < n; v++)
    if (!alive[v]) res.aborted.push_back(v);
  res.schedule = topo_order(g, alive);
  return res;
}

}  // namespace chainlab::exec
