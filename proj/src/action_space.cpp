#include "chainlab/exec/action_space.hpp"

namespace chainlab::exec {

std::string ArchitectureConfig::name() const {
  std::string base;
  if (!early_execution && !dep_graph) base = "ox";
  else if (!early_execution && dep_graph) base = "oxii";
  else if (early_execution && !dep_graph) base = block_size == 1 ? "stream" : "xov";
  else base = "xov+reorder";
  return base + "/b" + std::to_string(block_size);
}

const std::vector<uint32_t>& block_size_paces() {
  static const std::vector<uint32_t> paces = {
      1,   2,   4,   8,   16,  25,  50,  75,  100, 150, 200, 250, 300,
      350, 400, 450, 500, 550, 600, 650, 700, 750, 800, 850, 1000};
  return paces;
}

const std::vector<ArchitectureConfig>& enumerate_actions() {
  static const std::vector<ArchitectureConfig> actions = [] {
    std::vector<ArchitectureConfig> out;
    for (uint32_t bs : block_size_paces())
      for (int early = 0; early <= 1; early++)
        for (int dep = 0; dep <= 1; dep++)
          out.push_back({bs, early != 0, dep != 0});
    return out;
  }();
  return actions;
}

int action_id(const ArchitectureConfig& config) {
  const auto& all = enumerate_actions();
  for (size_t i = 0; i < all.size(); i++)
    if (all[i] == config) return static_cast<int>(i);
  return -1;
}

}  // namespace chainlab::exec
