#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "chainlab/core/ledger.hpp"
#include "chainlab/exec/pipeline.hpp"
#include "chainlab/learn/forest.hpp"
#include "chainlab/peer/peer.hpp"
#include "chainlab/proto/messages.hpp"
#include "chainlab/sim/network.hpp"
#include "chainlab/workload/smallbank.hpp"

namespace chainlab::harness {

struct ExperimentConfig {
  uint64_t seed = 1;
  uint32_t peer_count = 4;
  uint32_t f = 1;
  uint64_t users = 1000;
  workload::WorkloadSchedule schedule;
  peer::SwitchParams sw;
  exec::CostModel costs;
  sim::NetParams net;
  peer::ModeSpec mode;
  learn::ForestParams forest;
  std::map<uint32_t, peer::ByzKind> byzantine;  // peer id -> behavior
  proto::Authenticator::Mode auth_mode = proto::Authenticator::Mode::Hmac;
  TimeUs drain_grace = 2 * kSecond;

  static ExperimentConfig from_json_file(const std::string& path);
  static ExperimentConfig from_json_text(const std::string& text);
};

struct PeerOutcome {
  uint32_t id = 0;
  peer::ByzKind byz = peer::ByzKind::None;
  uint64_t height = 0;
  std::string tip_hash_hex;
  std::string state_digest_hex;
  uint64_t delivered = 0;
  uint64_t block_txns = 0;
  uint64_t aborted = 0;      // abort-log entries
  uint64_t unprocessed = 0;  // delivered, still queued at the horizon
  bool chain_ok = false;
  bool serial_ok = false;
  std::vector<peer::EpisodeRecord> episodes;
  std::string ledger_export;  // newline-delimited block records
};

struct RunResult {
  ExperimentConfig config;
  TimeUs horizon = 0;
  uint32_t reference_peer = 0;  // lowest honest id
  std::vector<PeerOutcome> peers;
  std::vector<core::Ledger> ledgers;  // indexed like peers
  uint64_t net_messages = 0;
  uint64_t net_bytes = 0;

  const PeerOutcome& reference() const { return peers[reference_peer]; }
};

RunResult run_experiment(const ExperimentConfig& config);

// Replays the committed-valid transactions of every block serially, in
// block order, re-deriving writes from the transaction semantics, and
// compares the result to the ledger's state. This is the serializability
// oracle: it never looks at recorded write values.
bool serial_replay_matches(const core::Ledger& ledger,
                           const core::WorldState& genesis);

// Honest peers agree on the block at every height both have.
bool honest_prefixes_agree(const RunResult& r, std::string* detail = nullptr);

// Every delivered transaction is in exactly one of: a block, the abort log,
// or the still-queued remainder.
bool conservation_holds(const RunResult& r, std::string* detail = nullptr);

void write_metrics_csv(std::ostream& out, const RunResult& r);
void write_cumulative_csv(std::ostream& out, const RunResult& r);
void write_overhead_csv(std::ostream& out, const RunResult& r);
void write_overhead_summary_csv(std::ostream& out, const RunResult& r);

std::string metrics_csv(const RunResult& r);
std::string cumulative_csv(const RunResult& r);

struct GridCell {
  int action = -1;
  exec::ArchitectureConfig config;
  uint64_t episodes = 0;
  double mean_throughput = 0;  // committed-valid txns per offered-load second
  uint64_t slow_paths = 0;
};

// Runs every action in fixed mode under the same workload and seed.
std::vector<GridCell> grid_search(const ExperimentConfig& base,
                                  unsigned parallelism = 0);

void write_grid_csv(std::ostream& out, const std::vector<GridCell>& grid);

}  // namespace chainlab::harness
