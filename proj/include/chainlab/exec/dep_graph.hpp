#pragma once

#include <cstdint>
#include <vector>

#include "chainlab/core/types.hpp"

namespace chainlab::exec {

enum class GraphMode {
  // Block-order conflict graph over declared key sets: edge i -> j iff i
  // precedes j and they have a WR, RW, or WW conflict. Acyclic by
  // construction.
  Oxii,
  // RW conflict graph over simulated read/write sets: edge i -> j iff i
  // reads a key j writes, both directions possible.
  Reorder,
};

struct DependencyGraph {
  GraphMode mode = GraphMode::Oxii;
  std::vector<uint64_t> txn_ids;       // node -> transaction id
  std::vector<std::vector<int>> adj;   // node -> successors, sorted

  size_t size() const { return adj.size(); }
  size_t edge_count() const;
};

DependencyGraph build_dependency_graph(const std::vector<core::Transaction>& txns,
                                       GraphMode mode);

bool is_acyclic(const DependencyGraph& g);

struct ReorderResult {
  std::vector<int> schedule;   // surviving nodes, readers before writers
  std::vector<int> aborted;    // nodes removed, ascending
  uint64_t cycles_enumerated = 0;
  bool cap_hit = false;
};

// Johnson-style elementary cycle enumeration, then greedy abort: repeatedly
// remove the transaction on the most remaining cycles (ties to the lowest
// txn id) until none remain. If the enumeration exceeds `cycle_cap`, every
// transaction on any cycle is aborted instead of finishing the enumeration.
ReorderResult abort_cycles_and_reorder(const DependencyGraph& g,
                                       uint64_t cycle_cap = 1'000'000);

// Deterministic topological order (lowest block position first among ready
// nodes). Throws if the graph restricted to `alive` has a cycle.
std::vector<int> topo_order(const DependencyGraph& g,
                            const std::vector<char>& alive);

}  // namespace chainlab::exec
