#pragma once

#include <deque>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "chainlab/core/ledger.hpp"
#include "chainlab/exec/pipeline.hpp"
#include "chainlab/learn/agent.hpp"
#include "chainlab/proto/messages.hpp"
#include "chainlab/sim/network.hpp"

namespace chainlab::peer {

enum class ByzKind {
  None,
  ExtremeMeasurement,  // reports measurements inflated by 1e6
  EquivocatePropose,   // as leader, sends a different proposal per peer
  WrongArchitecture,   // executes with a self-chosen architecture
  Silent,              // sends nothing
  FastAhead,           // claims a block height 2 past its own on the slow path
};

const char* to_string(ByzKind k);

struct SwitchParams {
  uint64_t dn_episode = 1000;  // transactions per episode
  uint64_t dn_learn = 750;     // transactions before the learning trigger
  TimeUs timeout = 3 * kSecond;            // slow-path timer
  TimeUs phase_timeout = 1500 * kMillisecond;  // agreement-phase view change
};

// Action selection policy. Forced entries override everything for their
// episode; otherwise Fixed pins one action and Adaptive asks the agent.
struct ModeSpec {
  enum class Kind { Adaptive, Fixed };
  Kind kind = Kind::Adaptive;
  int fixed_action = -1;
  std::map<uint64_t, int> forced;
};

struct EpisodeRecord {
  uint64_t episode = 0;
  int action = -1;
  exec::ArchitectureConfig config;
  bool slow_path = false;
  TimeUs start = 0;
  TimeUs end = 0;
  uint64_t blocks = 0;
  uint64_t valid = 0;
  uint64_t invalidated = 0;
  uint64_t early_aborted = 0;
  uint64_t episode_aborted = 0;
  uint64_t ordering_rejected = 0;
  double local_e = 0;
  double local_p = 0;
  double agreed_e = 0;
  double agreed_p = 0;
  TimeUs featurize_wall = 0;  // measured
  TimeUs train_wall = 0;      // measured
  TimeUs infer_wall = 0;      // measured
  TimeUs communicate_sim = 0;  // simulated agreement latency
  Digest tip_hash{};
};

struct PeerEnv {
  sim::EventLoop* loop = nullptr;
  sim::Network* net = nullptr;
  const proto::Authenticator* auth = nullptr;
  uint32_t peer_count = 4;
  uint32_t f = 1;
  exec::CostModel costs;
  SwitchParams sw;
  uint64_t run_seed = 0;
  ModeSpec mode;
  learn::ForestParams forest;
};

// One replica: entry point for clients, orderer when leader, block former,
// switch-protocol participant, and learning-agent host.
class Peer {
 public:
  Peer(uint32_t id, const PeerEnv& env, core::WorldState genesis, ByzKind byz);

  // Selects the first episode's action and arms the slow-path timer.
  void start();

  void on_message(const proto::Message& m);

  uint32_t id() const { return id_; }
  ByzKind byzantine() const { return byz_; }
  uint64_t episode() const { return episode_; }
  uint32_t view() const { return view_; }
  const core::Ledger& ledger() const { return ledger_; }
  const learn::Agent& agent() const { return agent_; }
  const std::vector<EpisodeRecord>& records() const { return records_; }
  const EpisodeRecord& current_record() const { return cur_; }
  uint64_t delivered_txns() const { return delivered_txns_; }
  // Delivered but not yet settled into a block or the abort log.
  uint64_t unprocessed_txns() const;
  const exec::ArchitectureConfig& config() const { return nominal_config_; }

 private:
  bool is_leader() const { return view_ % env_.peer_count == id_; }
  uint32_t leader_id() const { return view_ % env_.peer_count; }
  std::vector<uint32_t> all_peers() const;
  void sign_and_multicast(proto::Message m);

  // Entry role
  void handle_submit(core::Transaction t);
  void forward_txn(core::Transaction t, bool resubmit = false);

  // Ordering role
  void ordering_submit(core::Transaction t);
  void try_cut();

  // Delivery and block formation
  void handle_batch(const proto::Message& m);
  void try_form();
  void commit_block(exec::BlockResult res);
  void after_commit();

  // Normal switch path
  void start_learning(bool slow);
  void handle_checkpoint(const proto::Message& m);
  void maybe_propose();
  void handle_propose(const proto::Message& m);
  void handle_accept(const proto::Message& m);
  void handle_commit(const proto::Message& m);
  void finalize_agreement(double e, double p);
  void do_transition();

  // Slow path
  void on_slow_timer(uint64_t epoch);
  void enter_slow_path();
  void handle_s_checkpoint(const proto::Message& m);
  void maybe_s_propose();
  void handle_s_propose(const proto::Message& m);
  void handle_s_accept(const proto::Message& m);
  void handle_s_commit(const proto::Message& m);
  void s_finalize(uint64_t watermark);

  void schedule_phase_timeout();
  void view_change();
  void record_local_p();
  exec::ArchitectureConfig pick_action(uint64_t episode,
                                       const proto::Features& state,
                                       learn::AgentTimings* timings);
  void apply_episode_config(const exec::ArchitectureConfig& nominal);
  void begin_episode(uint64_t episode, TimeUs start);
  void recount_episode_metrics();

  uint32_t id_;
  PeerEnv env_;
  ByzKind byz_;
  core::Ledger ledger_;
  learn::Agent agent_;

  // Episode control
  uint64_t episode_ = 1;
  exec::ArchitectureConfig nominal_config_;
  exec::ArchitectureConfig exec_config_;
  uint64_t w_low_ = 0;
  uint64_t w_high_ = 0;
  uint64_t episode_first_block_ = 1;
  uint64_t budget_txns_ = 0;
  TimeUs episode_start_ = 0;
  uint64_t timer_epoch_ = 0;

  uint32_t view_ = 0;

  // Ordering (leader role)
  std::deque<core::Transaction> order_queue_;
  // cut-time stale, awaiting
                                                 // the next batch multicast
  uint64_t next_batch_seq_ = 1;
  uint64_t cut_this_episode_ = 0;
  std::unordered_set<uint64_t> seen_ids_;

  // Delivery
  std::map<uint64_t, proto::OrderedBatch> pending_batches_;
  uint64_t next_deliver_seq_ = 1;
  uint64_t delivered_txns_ = 0;
  std::unordered_set<uint64_t> delivered_ids_;
  std::map<uint64_t, uint64_t> tagged_delivered_;  // episode tag -> txns
  std::deque<proto::OrderedBatch> formation_queue_;
  std::map<uint64_t, proto::OrderedBatch> batch_history_;  // height -> source
  bool forming_ = false;
  uint64_t forming_txns_ = 0;
  bool paused_ = false;

  // Entry simulation lanes (XOV family)
  std::vector<TimeUs> lane_free_;
  std::unordered_map<uint64_t, core::Transaction> pending_entry_;

  // Learning phase
  bool learning_started_ = false;
  bool finalized_ = false;
  bool p_recorded_ = false;
  double local_p_ = 0;
  proto::Features local_features_;
  TimeUs checkpoint_sent_at_ = 0;
  std::map<uint64_t, std::map<uint32_t, proto::Message>> checkpoints_;
  bool proposed_ = false;
  bool accepted_ = false;
  bool commit_sent_ = false;
  std::map<std::pair<double, double>, std::set<uint32_t>> accepts_, commits_;
  bool next_action_ready_ = false;
  bool waiting_action_ = false;
  exec::ArchitectureConfig next_nominal_;
  proto::Features pending_state_;       // state that selected this episode
  proto::Features next_pending_state_;  // state that selected the next one
  uint64_t valid_this_episode_ = 0;

  // Slow path
  bool slow_timer_fired_ = false;
  bool in_slow_path_ = false;
  bool slow_resolved_ = false;
  bool s_proposed_ = false;
  bool s_accepted_ = false;
  bool s_commit_sent_ = false;
  TimeUs s_sent_at_ = 0;
  std::map<uint64_t, std::map<uint32_t, proto::Message>> s_checkpoints_;
  std::map<uint64_t, std::set<uint32_t>> s_accepts_, s_commits_;

  EpisodeRecord cur_;
  std::vector<EpisodeRecord> records_;
};

// Outgoing-message transform realizing a Byzantine behavior; messages are
// re-signed with the peer's own key so authenticators stay valid.
sim::Network::Filter make_byzantine_filter(ByzKind kind,
                                           const proto::Authenticator& auth);

}  // namespace chainlab::peer
