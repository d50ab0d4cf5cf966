#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace chainlab::exec {

// One point in the action space: (block size, early execution, dependency
// graph). (false,false)=OX, (false,true)=OXII, (true,false)=XOV,
// (true,true)=XOV+reorder; XOV with block size 1 is stream processing.
struct ArchitectureConfig {
  uint32_t block_size = 100;
  bool early_execution = false;
  bool dep_graph = false;

  bool operator==(const ArchitectureConfig&) const = default;

  bool is_xov_family() const { return early_execution; }
  bool is_reorder() const { return early_execution && dep_graph; }
  std::string name() const;
};

// The 25 block-size paces, log-spaced at the small end and linear above,
// capped at 1000.
const std::vector<uint32_t>& block_size_paces();

// Canonical 100-action enumeration: block sizes ascending, then early
// execution, then dependency graph.
const std::vector<ArchitectureConfig>& enumerate_actions();

// Index of `config` in enumerate_actions(); -1 when not a member.
int action_id(const ArchitectureConfig& config);

}  // namespace chainlab::exec
