#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "chainlab/core/types.hpp"
#include "chainlab/core/world_state.hpp"

namespace chainlab::workload {

inline Key key_savings(uint64_t user) { return 2 * user; }
inline Key key_checking(uint64_t user) { return 2 * user + 1; }

// Pure transaction semantics: write values as a function of the read values.
// Reader is called for exactly the declared read keys.
std::vector<core::WriteEntry> compute_writes(
    const core::Transaction& t, const std::function<int64_t(Key)>& read);

struct WorkloadParams {
  double p_write = 0.5;    // probability of a modifying transaction
  double p_hot = 0.5;      // probability an account reference is hot
  uint64_t n_hot = 10;     // hot user count
  uint32_t n_trans = 100;  // transactions fired per tick
  TimeUs t_fire = 50 * kMillisecond;
  TimeUs t_compute = 0;
};

// Table-driven presets A..E.
WorkloadParams preset(char name);
bool is_preset_name(const std::string& s);

struct ScheduleSegment {
  WorkloadParams params;
  TimeUs duration = 0;
};

struct WorkloadSchedule {
  std::vector<ScheduleSegment> segments;
  TimeUs total_duration() const;
  // Params in force at time t (segments switch with no gap; past the end the
  // last segment's params are reported).
  const WorkloadParams& at(TimeUs t) const;
};

// 2 * user_count account keys, deterministic initial balances.
core::WorldState preload(uint64_t user_count, uint64_t seed);

class TxnGenerator {
 public:
  TxnGenerator(uint64_t user_count, uint64_t seed);

  core::Transaction next(const WorkloadParams& params);
  uint64_t generated() const { return next_id_; }

 private:
  uint64_t pick_account(const WorkloadParams& params);

  uint64_t user_count_;
  uint64_t next_id_ = 0;
  std::mt19937_64 rng_;
};

}  // namespace chainlab::workload
