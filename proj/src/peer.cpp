#include "chainlab/peer/peer.hpp"

#include <algorithm>
#include <chrono>

namespace chainlab::peer {

using core::Transaction;
using core::Validity;
using proto::Message;
using proto::MsgType;

namespace {

TimeUs wall_now() {
  return std::chrono::duration_cast<std::chrono::microseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

const char* to_string(ByzKind k) {
  switch (k) {
    case ByzKind::None: return "none";
    case ByzKind::ExtremeMeasurement: return "extreme-measurement";
    case ByzKind::EquivocatePropose: return "equivocate-propose";
    case ByzKind::WrongArchitecture: return "wrong-architecture";
    case ByzKind::Silent: return "silent";
    case ByzKind::FastAhead: return "fast-ahead";
  }
  return "?";
}

Peer::Peer(uint32_t id, const PeerEnv& env, core::WorldState genesis,
           ByzKind byz)
    : id_(id),
      env_(env),
      byz_(byz),
      ledger_(std::move(genesis)),
      agent_(env.run_seed, env.forest),
      lane_free_(env.costs.workers, 0) {}

uint64_t Peer::unprocessed_txns() const {
  uint64_t n = forming_txns_;
  for (const auto& b : formation_queue_) n += b.txns.size();
  return n;
}

std::vector<uint32_t> Peer::all_peers() const {
  std::vector<uint32_t> out(env_.peer_count);
  for (uint32_t i = 0; i < env_.peer_count; i++) out[i] = i;
  return out;
}

void Peer::sign_and_multicast(Message m) {
  m.sender = id_;
  env_.auth->sign(m);
  for (uint32_t p : all_peers()) env_.net->send(id_, p, m);
}

exec::ArchitectureConfig Peer::pick_action(uint64_t episode,
                                           const proto::Features& state,
                                           learn::AgentTimings* timings) {
  const auto& actions = exec::enumerate_actions();
  auto it = env_.mode.forced.find(episode);
  if (it != env_.mode.forced.end()) return actions.at(it->second);
  if (env_.mode.kind == ModeSpec::Kind::Fixed)
    return actions.at(env_.mode.fixed_action);
  return agent_.select(state, episode, timings);
}

void Peer::apply_episode_config(const exec::ArchitectureConfig& nominal) {
  nominal_config_ = nominal;
  exec_config_ = nominal;
  if (byz_ == ByzKind::WrongArchitecture) {
    exec_config_.early_execution = false;
    exec_config_.dep_graph = false;
  }
}

void Peer::begin_episode(uint64_t episode, TimeUs start) {
  episode_ = episode;
  uint64_t bs = nominal_config_.block_size;
  uint64_t wh_off = std::max<uint64_t>(1, env_.sw.dn_episode / bs);
  uint64_t wl_off =
      std::clamp<uint64_t>(env_.sw.dn_learn / bs, 1, wh_off);
  episode_first_block_ = w_high_ + 1;
  w_low_ = w_high_ + wl_off;
  w_high_ = w_high_ + wh_off;
  budget_txns_ = wh_off * bs;
  cut_this_episode_ = tagged_delivered_[episode];
  episode_start_ = start;
  valid_this_episode_ = 0;
  learning_started_ = finalized_ = p_recorded_ = false;
  local_p_ = 0;
  local_features_ = proto::Features{};
  proposed_ = accepted_ = commit_sent_ = false;
  accepts_.clear();
  commits_.clear();
  next_action_ready_ = waiting_action_ = false;
  slow_timer_fired_ = in_slow_path_ = slow_resolved_ = false;
  s_proposed_ = s_accepted_ = s_commit_sent_ = false;
  s_accepts_.clear();
  s_commits_.clear();
  batch_history_.clear();
  checkpoints_.erase(checkpoints_.begin(), checkpoints_.lower_bound(episode));
  s_checkpoints_.erase(s_checkpoints_.begin(),
                       s_checkpoints_.lower_bound(episode));
  paused_ = false;

  cur_ = EpisodeRecord{};
  cur_.episode = episode;
  cur_.action = exec::action_id(nominal_config_);
  cur_.config = nominal_config_;
  cur_.start = start;

  timer_epoch_++;
  uint64_t epoch = timer_epoch_;
  env_.loop->after(env_.sw.timeout, [this, epoch] { on_slow_timer(epoch); });
}

void Peer::start() {
  proto::Features zero{};
  apply_episode_config(pick_action(1, zero, nullptr));
  pending_state_ = zero;
  begin_episode(1, env_.loop->now());
}

void Peer::on_message(const Message& m) {
  if (!env_.auth->verify(m)) return;
  switch (m.type) {
    case MsgType::Submit: handle_submit(m.txn); break;
    case MsgType::Forward: ordering_submit(m.txn); break;
    case MsgType::Batch: handle_batch(m); break;
    case MsgType::Checkpoint: handle_checkpoint(m); break;
    case MsgType::Propose: handle_propose(m); break;
    case MsgType::Accept: handle_accept(m); break;
    case MsgType::Commit: handle_commit(m); break;
    case MsgType::SCheckpoint: handle_s_checkpoint(m); break;
    case MsgType::SPropose: handle_s_propose(m); break;
    case MsgType::SAccept: handle_s_accept(m); break;
    case MsgType::SCommit: handle_s_commit(m); break;
  }
}

// ---------------------------------------------------------------- entry role

void Peer::handle_submit(Transaction t) {
  if (!exec_config_.is_xov_family()) {
    forward_txn(std::move(t));
    return;
  }
  // Speculative simulation on the earliest-free core; reads are captured
  // when the core picks the transaction up.
  size_t lane = 0;
  for (size_t i = 1; i < lane_free_.size(); i++)
    if (lane_free_[i] < lane_free_[lane]) lane = i;
  TimeUs begin = std::max(env_.loop->now(), lane_free_[lane]);
  lane_free_[lane] = begin + t.compute_delay;
  env_.loop->at(begin, [this, t = std::move(t)]() mutable {
    exec::simulate_txn(t, ledger_.state().snapshot());
    env_.loop->after(t.compute_delay, [this, t = std::move(t)]() mutable {
      if (exec_config_.is_reorder() &&
          !exec::reads_still_fresh(t, ledger_.state()))
        t.validity = Validity::EarlyAborted;
      forward_txn(std::move(t));
    });
  });
}

void Peer::forward_txn(Transaction t, bool resubmit) {
  if (!resubmit) pending_entry_[t.id] = t;
  if (leader_id() == id_) {
    ordering_submit(std::move(t));
    return;
  }
  Message m;
  m.type = MsgType::Forward;
  m.sender = id_;
  m.view = view_;
  m.episode = episode_;
  m.txn = std::move(t);
  env_.auth->sign(m);
  env_.net->send(id_, leader_id(), std::move(m));
}

// ------------------------------------------------------------- ordering role

void Peer::ordering_submit(Transaction t) {
  if (delivered_ids_.count(t.id) || seen_ids_.count(t.id)) return;
  seen_ids_.insert(t.id);
  // Flow control: admit at most a couple of blocks' worth of transactions.
  // Anything beyond that would only sit in the queue going stale; a real
  // ordering service pushes back on submitters long before that.
  uint64_t cap = std::max<uint64_t>(2 * nominal_config_.block_size, 128);
  if (order_queue_.size() >= cap) {
    cur_.ordering_rejected++;
    return;
  }
  order_queue_.push_back(std::move(t));
  try_cut();
}

void Peer::try_cut() {
  if (!is_leader() || in_slow_path_) return;
  order_queue_.erase(
      std::remove_if(order_queue_.begin(), order_queue_.end(),
                     [&](const Transaction& t) {
                       return delivered_ids_.count(t.id) > 0;
                     }),
      order_queue_.end());
  uint32_t bs = nominal_config_.block_size;
  // Reorder architectures early-abort in the ordering phase as well: the
  // block is cut from the next bs ordered transactions, and any whose reads
  // are already stale at cut time are pruned from it. Pruned txns consumed
  // ordering budget (they were ordered) but never take a block slot; they
  // ride the batch's purge list to every peer's abort log.
  const bool purge = exec_config_.is_reorder();
  while (cut_this_episode_ + bs <= budget_txns_ && order_queue_.size() >= bs) {
    std::vector<Transaction> fresh;
    std::vector<Transaction> purged;
    fresh.reserve(bs);
    for (uint32_t i = 0; i < bs; i++) {
      Transaction t = std::move(order_queue_.front());
      order_queue_.pop_front();
      if (purge && (t.validity == Validity::EarlyAborted ||
                    (t.simulated &&
                     !exec::reads_still_fresh(t, ledger_.state())))) {
        purged.push_back(std::move(t));
      } else {
        fresh.push_back(std::move(t));
      }
    }
    proto::OrderedBatch b;
    b.seq = next_batch_seq_++;
    b.episode = episode_;
    b.txns = std::move(fresh);
    for (auto& t : b.txns) t.episode_tag = episode_;
    b.purged = std::move(purged);
    for (auto& t : b.purged) t.episode_tag = episode_;
    cut_this_episode_ += bs;
    Message m;
    m.type = MsgType::Batch;
    m.sender = id_;
    m.view = view_;
    m.episode = episode_;
    m.batch = std::move(b);
    env_.auth->sign(m);
    for (uint32_t p : all_peers()) env_.net->send(id_, p, m);
  }
}

// --------------------------------------------------- delivery and formation

void Peer::handle_batch(const Message& m) {
  if (m.sender != m.view % env_.peer_count) return;
  const auto& b = m.batch;
  next_batch_seq_ = std::max(next_batch_seq_, b.seq + 1);
  if (b.seq < next_deliver_seq_ || pending_batches_.count(b.seq)) return;
  pending_batches_[b.seq] = b;
  while (true) {
    auto it = pending_batches_.find(next_deliver_seq_);
    if (it == pending_batches_.end()) break;
    for (const auto& t : it->second.txns) {
      delivered_ids_.insert(t.id);
      pending_entry_.erase(t.id);
    }
    delivered_txns_ += it->second.txns.size();
    tagged_delivered_[it->second.episode] +=
        it->second.txns.size() + it->second.purged.size();
    // Ordering-phase early aborts go straight to the abort log; they count
    // toward the episode budget (they were ordered) but never occupy a
    // block slot.
    for (auto& t : it->second.purged) {
      if (!delivered_ids_.insert(t.id).second) continue;
      pending_entry_.erase(t.id);
      delivered_txns_++;
      t.validity = Validity::EarlyAborted;
      ledger_.record_abort(t, Validity::EarlyAborted);
      cur_.early_aborted++;
    }
    it->second.purged_count = static_cast<uint32_t>(it->second.purged.size());
    it->second.purged.clear();
    formation_queue_.push_back(std::move(it->second));
    pending_batches_.erase(it);
    next_deliver_seq_++;
  }
  try_form();
}

void Peer::try_form() {
  while (!forming_ && !paused_ && !formation_queue_.empty()) {
    auto& front = formation_queue_.front();
    if (front.episode < episode_) {
      // Stale tag: the architecture moved on while these were in flight.
      for (auto& t : front.txns)
        ledger_.record_abort(t, Validity::EpisodeAborted);
      cur_.episode_aborted += front.txns.size();
      formation_queue_.pop_front();
      continue;
    }
    if (front.episode > episode_) return;  // wait for our own transition
    proto::OrderedBatch batch = std::move(front);
    formation_queue_.pop_front();
    forming_ = true;
    forming_txns_ = batch.txns.size();
    uint64_t height = ledger_.height() + 1;
    batch_history_[height] = batch;
    exec::ArchitectureConfig cfg = exec_config_;
    cfg.block_size =
        std::max<uint32_t>(cfg.block_size, batch.txns.size());
    auto res = exec::process_block(cfg, batch.txns, ledger_.state(), height,
                                   episode_, env_.costs);
    // Pruned txns were ordered too; their ordering work is part of the
    // block's span even though they never reached a slot.
    res.outcome.duration += static_cast<TimeUs>(batch.purged_count) *
                            env_.costs.ordering_per_txn;
    env_.loop->after(res.outcome.duration,
                     [this, r = std::move(res)]() mutable {
                       commit_block(std::move(r));
                     });
    return;
  }
}

void Peer::commit_block(exec::BlockResult res) {
  const auto& o = res.outcome;
  cur_.blocks++;
  cur_.valid += o.valid;
  cur_.invalidated += o.invalidated;
  cur_.early_aborted += o.early_aborted;
  valid_this_episode_ += o.valid;
  ledger_.commit(std::move(res.block));
  forming_ = false;
  forming_txns_ = 0;
  after_commit();
}

void Peer::after_commit() {
  uint64_t h = ledger_.height();
  if (in_slow_path_) {
    if (slow_resolved_) {
      if (h == w_high_)
        start_learning(true);
      else
        try_form();
    }
    return;
  }
  if (slow_timer_fired_) {
    enter_slow_path();
    return;
  }
  if (h == w_low_ && !learning_started_) start_learning(false);
  if (h == w_high_) {
    if (next_action_ready_) {
      do_transition();
    } else {
      paused_ = true;
      waiting_action_ = true;
    }
    return;
  }
  try_form();
}

// ------------------------------------------------------- normal switch path

void Peer::record_local_p() {
  if (p_recorded_) return;
  TimeUs elapsed =
      std::max(env_.loop->now() - episode_start_, TimeUs{kMillisecond});
  local_p_ = static_cast<double>(valid_this_episode_) / us_to_seconds(elapsed);
  p_recorded_ = true;
}

void Peer::start_learning(bool slow) {
  learning_started_ = true;
  record_local_p();
  TimeUs t0 = wall_now();
  uint64_t window_end = std::min(ledger_.height(), slow ? w_high_ : w_low_);
  std::vector<const core::Block*> window;
  for (uint64_t i = episode_first_block_; i <= window_end; i++)
    window.push_back(&ledger_.block_at(i));
  local_features_ = learn::featurize(window);
  cur_.featurize_wall += wall_now() - t0;

  Message m;
  m.type = MsgType::Checkpoint;
  m.view = view_;
  m.episode = episode_;
  m.features = local_features_;
  m.e = local_features_.exec_delay_ms;
  m.p = local_p_;
  checkpoint_sent_at_ = env_.loop->now();
  sign_and_multicast(std::move(m));
  if (slow) {
    paused_ = true;
    waiting_action_ = true;
  }
  schedule_phase_timeout();
  maybe_propose();
}

void Peer::handle_checkpoint(const Message& m) {
  if (m.episode < episode_) return;
  checkpoints_[m.episode].emplace(m.sender, m);
  maybe_propose();
}

void Peer::maybe_propose() {
  if (!is_leader() || !learning_started_ || finalized_ || proposed_) return;
  auto it = checkpoints_.find(episode_);
  if (it == checkpoints_.end()) return;
  uint32_t quorum = 2 * env_.f + 1;
  if (it->second.size() < quorum) return;
  Message m;
  m.type = MsgType::Propose;
  m.view = view_;
  m.episode = episode_;
  std::vector<double> es, ps;
  for (const auto& [sender, ck] : it->second) {
    if (m.certificate.size() == quorum) break;
    m.certificate.push_back(ck);
    es.push_back(ck.e);
    ps.push_back(ck.p);
  }
  m.e = proto::lower_median(std::move(es));
  m.p = proto::lower_median(std::move(ps));
  proposed_ = true;
  sign_and_multicast(std::move(m));
}

void Peer::handle_propose(const Message& m) {
  if (m.episode != episode_ || m.view < view_) return;
  if (m.sender != m.view % env_.peer_count) return;
  if (!proto::validate_propose(m, env_.f, *env_.auth)) return;
  if (m.view > view_) view_ = m.view;
  if (accepted_) return;
  accepted_ = true;
  Message a;
  a.type = MsgType::Accept;
  a.view = view_;
  a.episode = episode_;
  a.e = m.e;
  a.p = m.p;
  sign_and_multicast(std::move(a));
}

void Peer::handle_accept(const Message& m) {
  if (m.episode != episode_) return;
  auto& voters = accepts_[{m.e, m.p}];
  voters.insert(m.sender);
  if (voters.size() < 2 * env_.f + 1 || commit_sent_) return;
  commit_sent_ = true;
  Message c;
  c.type = MsgType::Commit;
  c.view = view_;
  c.episode = episode_;
  c.e = m.e;
  c.p = m.p;
  sign_and_multicast(std::move(c));
}

void Peer::handle_commit(const Message& m) {
  if (m.episode != episode_) return;
  auto& voters = commits_[{m.e, m.p}];
  voters.insert(m.sender);
  if (voters.size() >= 2 * env_.f + 1 && !finalized_)
    finalize_agreement(m.e, m.p);
}

void Peer::finalize_agreement(double e, double p) {
  finalized_ = true;
  cur_.agreed_e = e;
  cur_.agreed_p = p;
  cur_.local_e = local_features_.exec_delay_ms;
  cur_.local_p = local_p_;
  cur_.communicate_sim += env_.loop->now() - checkpoint_sent_at_;

  agent_.record(episode_, pending_state_, nominal_config_, p);
  proto::Features next_state = local_features_;
  next_state.exec_delay_ms = e;
  learn::AgentTimings tm;
  next_nominal_ = pick_action(episode_ + 1, next_state, &tm);
  next_pending_state_ = next_state;
  cur_.train_wall += tm.train_wall;
  cur_.infer_wall += tm.infer_wall;
  next_action_ready_ = true;
  if (waiting_action_) do_transition();
}

void Peer::do_transition() {
  cur_.end = env_.loop->now();
  cur_.tip_hash = ledger_.tip_hash();
  records_.push_back(cur_);
  pending_state_ = next_pending_state_;
  apply_episode_config(next_nominal_);
  begin_episode(episode_ + 1, env_.loop->now());
  try_cut();
  try_form();
}

// ------------------------------------------------------------------ slow path

void Peer::on_slow_timer(uint64_t epoch) {
  if (epoch != timer_epoch_) return;
  if (learning_started_ || in_slow_path_) return;
  if (ledger_.height() >= w_low_) return;
  slow_timer_fired_ = true;
  if (!forming_) enter_slow_path();
}

void Peer::enter_slow_path() {
  in_slow_path_ = true;
  paused_ = true;
  if (cur_.blocks == 0) {
    // No block all episode points at the orderer; rotate before retrying.
    view_++;
    std::vector<Transaction> pending;
    for (const auto& [id, t] : pending_entry_) pending.push_back(t);
    std::sort(pending.begin(), pending.end(),
              [](const Transaction& a, const Transaction& b) {
                return a.id < b.id;
              });
    for (auto& t : pending) forward_txn(std::move(t), true);
  }
  record_local_p();
  Message m;
  m.type = MsgType::SCheckpoint;
  m.view = view_;
  m.episode = episode_;
  m.b_last = ledger_.height();
  s_sent_at_ = env_.loop->now();
  sign_and_multicast(std::move(m));
  schedule_phase_timeout();
  maybe_s_propose();
}

void Peer::handle_s_checkpoint(const Message& m) {
  if (m.episode < episode_) return;
  s_checkpoints_[m.episode].emplace(m.sender, m);
  if (!in_slow_path_ && !learning_started_ && m.episode == episode_ &&
      s_checkpoints_[episode_].size() >= env_.f + 1) {
    // Enough reports that at least one honest peer timed out: join.
    slow_timer_fired_ = true;
    if (!forming_) enter_slow_path();
  }
  maybe_s_propose();
}

void Peer::maybe_s_propose() {
  if (!is_leader() || !in_slow_path_ || slow_resolved_ || s_proposed_) return;
  auto it = s_checkpoints_.find(episode_);
  if (it == s_checkpoints_.end()) return;
  uint32_t quorum = 2 * env_.f + 1;
  if (it->second.size() < quorum) return;
  Message m;
  m.type = MsgType::SPropose;
  m.view = view_;
  m.episode = episode_;
  uint64_t max_b = 0;
  for (const auto& [sender, sc] : it->second) {
    if (m.certificate.size() == quorum) break;
    m.certificate.push_back(sc);
    max_b = std::max(max_b, sc.b_last);
  }
  m.watermark = std::min(max_b, w_high_);
  s_proposed_ = true;
  sign_and_multicast(std::move(m));
}

void Peer::handle_s_propose(const Message& m) {
  if (m.episode != episode_ || m.view < view_) return;
  if (m.sender != m.view % env_.peer_count) return;
  if (!proto::validate_s_propose(m, env_.f, *env_.auth, w_high_)) return;
  if (m.view > view_) view_ = m.view;
  if (s_accepted_) return;
  s_accepted_ = true;
  Message a;
  a.type = MsgType::SAccept;
  a.view = view_;
  a.episode = episode_;
  a.watermark = m.watermark;
  sign_and_multicast(std::move(a));
}

void Peer::handle_s_accept(const Message& m) {
  if (m.episode != episode_) return;
  auto& voters = s_accepts_[m.watermark];
  voters.insert(m.sender);
  if (voters.size() < 2 * env_.f + 1 || s_commit_sent_) return;
  s_commit_sent_ = true;
  Message c;
  c.type = MsgType::SCommit;
  c.view = view_;
  c.episode = episode_;
  c.watermark = m.watermark;
  sign_and_multicast(std::move(c));
}

void Peer::handle_s_commit(const Message& m) {
  if (m.episode != episode_) return;
  auto& voters = s_commits_[m.watermark];
  voters.insert(m.sender);
  if (voters.size() >= 2 * env_.f + 1 && !slow_resolved_)
    s_finalize(m.watermark);
}

void Peer::s_finalize(uint64_t watermark) {
  slow_resolved_ = true;
  cur_.slow_path = true;
  cur_.communicate_sim += env_.loop->now() - s_sent_at_;
  if (ledger_.height() > watermark) {
    // Ahead of the agreed end: roll back, but keep the rolled-back batches
    // queued so the shared order is preserved (they will carry a stale tag
    // by the time formation resumes).
    for (uint64_t h = ledger_.height(); h > watermark; h--) {
      auto it = batch_history_.find(h);
      if (it != batch_history_.end()) formation_queue_.push_front(it->second);
    }
    ledger_.rollback_to(watermark);
    recount_episode_metrics();
  }
  w_high_ = watermark;
  if (w_low_ > w_high_) w_low_ = w_high_;
  paused_ = false;
  if (ledger_.height() == w_high_)
    start_learning(true);
  else
    try_form();
}

void Peer::recount_episode_metrics() {
  cur_.blocks = cur_.valid = cur_.invalidated = cur_.early_aborted = 0;
  for (uint64_t h = episode_first_block_; h <= ledger_.height(); h++) {
    const auto& b = ledger_.block_at(h);
    cur_.blocks++;
    for (const auto& t : b.txns) {
      switch (t.validity) {
        case Validity::CommittedValid: cur_.valid++; break;
        case Validity::Invalidated: cur_.invalidated++; break;
        case Validity::EarlyAborted: cur_.early_aborted++; break;
        default: break;
      }
    }
  }
  valid_this_episode_ = cur_.valid;
}

// ------------------------------------------------------------- view changes

void Peer::schedule_phase_timeout() {
  uint64_t ep = episode_;
  uint32_t v = view_;
  env_.loop->after(env_.sw.phase_timeout, [this, ep, v] {
    if (episode_ != ep || view_ != v) return;
    bool normal_pending = learning_started_ && !finalized_;
    bool slow_pending = in_slow_path_ && !slow_resolved_;
    if (!normal_pending && !slow_pending) return;
    view_change();
  });
}

void Peer::view_change() {
  view_++;
  if (in_slow_path_ && !slow_resolved_) {
    s_proposed_ = s_accepted_ = s_commit_sent_ = false;
    s_accepts_.clear();
    s_commits_.clear();
    Message m;
    m.type = MsgType::SCheckpoint;
    m.view = view_;
    m.episode = episode_;
    m.b_last = ledger_.height();
    sign_and_multicast(std::move(m));
  } else {
    proposed_ = accepted_ = commit_sent_ = false;
    accepts_.clear();
    commits_.clear();
    Message m;
    m.type = MsgType::Checkpoint;
    m.view = view_;
    m.episode = episode_;
    m.features = local_features_;
    m.e = local_features_.exec_delay_ms;
    m.p = local_p_;
    sign_and_multicast(std::move(m));
  }
  if (is_leader())
    cut_this_episode_ =
        std::max(cut_this_episode_, tagged_delivered_[episode_]);
  // The previous leader may be gone; re-route undelivered transactions.
  std::vector<Transaction> pending;
  for (const auto& [id, t] : pending_entry_) pending.push_back(t);
  std::sort(pending.begin(), pending.end(),
            [](const Transaction& a, const Transaction& b) {
              return a.id < b.id;
            });
  for (auto& t : pending) forward_txn(std::move(t), true);
  try_cut();
  schedule_phase_timeout();
  maybe_propose();
  maybe_s_propose();
}

sim::Network::Filter make_byzantine_filter(ByzKind kind,
                                           const proto::Authenticator& auth) {
  switch (kind) {
    case ByzKind::None:
    case ByzKind::WrongArchitecture:
      return nullptr;
    case ByzKind::Silent:
      return [](uint32_t, Message) -> std::optional<Message> {
        return std::nullopt;
      };
    case ByzKind::ExtremeMeasurement:
      return [&auth](uint32_t, Message m) -> std::optional<Message> {
        if (m.type == MsgType::Checkpoint) {
          m.e *= 1e6;
          m.p *= 1e6;
          m.features.exec_delay_ms *= 1e6;
          m.features.arrival_rate *= 1e6;
          auth.sign(m);
        }
        return m;
      };
    case ByzKind::EquivocatePropose:
      return [&auth](uint32_t to, Message m) -> std::optional<Message> {
        if (m.type == MsgType::Propose) {
          double skew = 1.0 + 1e-3 * static_cast<double>(to + 1);
          m.e *= skew;
          m.p *= skew;
          auth.sign(m);
        }
        return m;
      };
    case ByzKind::FastAhead:
      return [&auth](uint32_t, Message m) -> std::optional<Message> {
        if (m.type == MsgType::SCheckpoint) {
          m.b_last += 2;
          auth.sign(m);
        }
        return m;
      };
  }
  return nullptr;
}

}  // namespace chainlab::peer
