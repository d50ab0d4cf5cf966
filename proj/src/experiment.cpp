#include "chainlab/harness/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <functional>
#include <fstream>
#include <future>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "chainlab/sim/event_loop.hpp"

namespace chainlab::harness {

using json = nlohmann::json;

namespace {

peer::ByzKind byz_from_string(const std::string& s) {
  if (s == "none") return peer::ByzKind::None;
  if (s == "extreme-measurement") return peer::ByzKind::ExtremeMeasurement;
  if (s == "equivocate-propose") return peer::ByzKind::EquivocatePropose;
  if (s == "wrong-architecture") return peer::ByzKind::WrongArchitecture;
  if (s == "silent") return peer::ByzKind::Silent;
  if (s == "fast-ahead") return peer::ByzKind::FastAhead;
  throw std::invalid_argument("unknown byzantine behavior: " + s);
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j = json::parse(text);
  ExperimentConfig c;
  c.seed = j.value("seed", c.seed);
  c.peer_count = j.value("peers", c.peer_count);
  c.f = j.value("f", c.f);
  c.users = j.value("users", c.users);

  if (j.contains("workload")) {
    for (const auto& seg : j.at("workload")) {
      workload::ScheduleSegment s;
      if (seg.contains("preset"))
        s.params = workload::preset(seg.at("preset").get<std::string>().at(0));
      if (seg.contains("p_write")) s.params.p_write = seg.at("p_write");
      if (seg.contains("p_hot")) s.params.p_hot = seg.at("p_hot");
      if (seg.contains("n_hot")) s.params.n_hot = seg.at("n_hot");
      if (seg.contains("n_trans")) s.params.n_trans = seg.at("n_trans");
      if (seg.contains("t_fire_ms"))
        s.params.t_fire = TimeUs(seg.at("t_fire_ms").get<int64_t>()) * kMillisecond;
      if (seg.contains("t_compute_ms"))
        s.params.t_compute =
            TimeUs(seg.at("t_compute_ms").get<double>() * kMillisecond);
      s.duration = TimeUs(seg.at("duration_ms").get<int64_t>()) * kMillisecond;
      c.schedule.segments.push_back(s);
    }
  }

  if (j.contains("switch")) {
    const auto& s = j.at("switch");
    c.sw.dn_episode = s.value("dn_episode", c.sw.dn_episode);
    c.sw.dn_learn = s.value("dn_learn", c.sw.dn_learn);
    if (s.contains("timeout_ms"))
      c.sw.timeout = TimeUs(s.at("timeout_ms").get<int64_t>()) * kMillisecond;
    if (s.contains("phase_timeout_ms"))
      c.sw.phase_timeout =
          TimeUs(s.at("phase_timeout_ms").get<int64_t>()) * kMillisecond;
  }
  if (j.contains("net")) {
    const auto& n = j.at("net");
    c.net.rtt = n.value("rtt_us", c.net.rtt);
    c.net.bandwidth_mbps = n.value("bandwidth_mbps", c.net.bandwidth_mbps);
  }
  if (j.contains("costs")) {
    const auto& k = j.at("costs");
    c.costs.block_overhead = k.value("block_overhead_us", c.costs.block_overhead);
    c.costs.ordering_per_txn = k.value("ordering_us", c.costs.ordering_per_txn);
    c.costs.validation_per_txn = k.value("validation_us", c.costs.validation_per_txn);
    c.costs.pair_check_ns = k.value("pair_check_ns", c.costs.pair_check_ns);
    c.costs.per_cycle = k.value("per_cycle_us", c.costs.per_cycle);
    c.costs.cycle_cap = k.value("cycle_cap", c.costs.cycle_cap);
    c.costs.workers = k.value("workers", c.costs.workers);
  }
  if (j.contains("mode")) {
    std::string m = j.at("mode");
    if (m == "adaptive") {
      c.mode.kind = peer::ModeSpec::Kind::Adaptive;
    } else if (m.rfind("fixed:", 0) == 0) {
      c.mode.kind = peer::ModeSpec::Kind::Fixed;
      c.mode.fixed_action = std::stoi(m.substr(6));
    } else {
      throw std::invalid_argument("unknown mode: " + m);
    }
  }
  if (j.contains("forced_actions"))
    for (const auto& [ep, a] : j.at("forced_actions").items())
      c.mode.forced[std::stoull(ep)] = a.get<int>();
  if (j.contains("byzantine"))
    for (const auto& [id, b] : j.at("byzantine").items())
      c.byzantine[std::stoul(id)] = byz_from_string(b.get<std::string>());
  if (j.contains("auth"))
    c.auth_mode = j.at("auth") == "none" ? proto::Authenticator::Mode::None
                                         : proto::Authenticator::Mode::Hmac;
  if (j.contains("drain_grace_ms"))
    c.drain_grace = TimeUs(j.at("drain_grace_ms").get<int64_t>()) * kMillisecond;
  return c;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

bool serial_replay_matches(const core::Ledger& ledger,
                           const core::WorldState& genesis) {
  core::WorldState state = genesis;
  for (const auto& b : ledger.blocks()) {
    for (const auto& t : b.txns) {
      if (t.validity != core::Validity::CommittedValid) continue;
      auto writes = workload::compute_writes(
          t, [&](Key k) { return state.get_or_zero(k).value; });
      for (const auto& w : writes) state.put(w.key, w.value, b.index);
    }
    state.set_height(b.index);
  }
  return state.same_contents(ledger.state());
}

RunResult run_experiment(const ExperimentConfig& config) {
  if (config.schedule.segments.empty())
    throw std::invalid_argument("experiment needs a workload schedule");
  if (config.peer_count < 3 * config.f + 1)
    throw std::invalid_argument("need at least 3f+1 peers");

  sim::EventLoop loop;
  uint32_t client = config.peer_count;  // one shared client node
  sim::Network net(loop, config.net, config.peer_count + 1);
  proto::Authenticator auth(config.auth_mode, config.seed,
                            config.peer_count + 1);

  core::WorldState genesis = workload::preload(config.users, config.seed);

  peer::PeerEnv env;
  env.loop = &loop;
  env.net = &net;
  env.auth = &auth;
  env.peer_count = config.peer_count;
  env.f = config.f;
  env.costs = config.costs;
  env.sw = config.sw;
  env.run_seed = config.seed;
  env.mode = config.mode;
  env.forest = config.forest;

  std::vector<std::unique_ptr<peer::Peer>> peers;
  for (uint32_t i = 0; i < config.peer_count; i++) {
    auto it = config.byzantine.find(i);
    peer::ByzKind byz =
        it == config.byzantine.end() ? peer::ByzKind::None : it->second;
    peers.push_back(std::make_unique<peer::Peer>(i, env, genesis, byz));
    if (auto filter = peer::make_byzantine_filter(byz, auth))
      net.set_outgoing_filter(i, std::move(filter));
  }
  for (uint32_t i = 0; i < config.peer_count; i++) {
    peer::Peer* p = peers[i].get();
    net.set_handler(i, [p](const proto::Message& m) { p->on_message(m); });
  }
  for (auto& p : peers) p->start();

  // Client driver: every tick fires n_trans submissions round-robin over
  // the entry peers.
  workload::TxnGenerator gen(config.users, config.seed);
  TimeUs schedule_end = config.schedule.total_duration();
  std::function<void()> tick = [&]() {
    TimeUs now = loop.now();
    if (now >= schedule_end) return;
    const auto& params = config.schedule.at(now);
    for (uint32_t i = 0; i < params.n_trans; i++) {
      core::Transaction t = gen.next(params);
      t.arrival_ts = now;
      proto::Message m;
      m.type = proto::MsgType::Submit;
      m.sender = client;
      m.txn = std::move(t);
      auth.sign(m);
      net.send(client, static_cast<uint32_t>(m.txn.id % config.peer_count), m);
    }
    loop.after(params.t_fire, tick);
  };
  loop.at(0, tick);

  TimeUs horizon = schedule_end + config.drain_grace;
  loop.run_until(horizon);

  RunResult r;
  r.config = config;
  r.horizon = horizon;
  r.net_messages = net.messages_sent();
  r.net_bytes = net.bytes_sent();
  bool ref_set = false;
  for (uint32_t i = 0; i < config.peer_count; i++) {
    const peer::Peer& p = *peers[i];
    PeerOutcome o;
    o.id = i;
    o.byz = p.byzantine();
    o.height = p.ledger().height();
    o.tip_hash_hex = to_hex(p.ledger().tip_hash());
    o.state_digest_hex = to_hex(p.ledger().state().digest());
    o.delivered = p.delivered_txns();
    for (const auto& b : p.ledger().blocks()) o.block_txns += b.txns.size();
    o.aborted = p.ledger().abort_log().size();
    o.unprocessed = p.unprocessed_txns();
    o.chain_ok = p.ledger().verify_chain();
    o.serial_ok = serial_replay_matches(p.ledger(), genesis);
    o.episodes = p.records();
    std::ostringstream ex;
    p.ledger().export_blocks(ex);
    o.ledger_export = ex.str();
    if (!ref_set && o.byz == peer::ByzKind::None) {
      r.reference_peer = i;
      ref_set = true;
    }
    r.peers.push_back(std::move(o));
    r.ledgers.push_back(p.ledger());
  }
  return r;
}

bool honest_prefixes_agree(const RunResult& r, std::string* detail) {
  const PeerOutcome* ref = nullptr;
  // One export line fully describes a block (hash included), so comparing
  // the common prefix of lines compares the chains.
  for (const auto& p : r.peers) {
    if (p.byz != peer::ByzKind::None) continue;
    if (!ref) {
      ref = &p;
      continue;
    }
    std::istringstream a(ref->ledger_export), b(p.ledger_export);
    std::string la, lb;
    uint64_t h = 0;
    while (std::getline(a, la) && std::getline(b, lb)) {
      h++;
      if (la != lb) {
        if (detail)
          *detail = "peers " + std::to_string(ref->id) + " and " +
                    std::to_string(p.id) + " diverge at height " +
                    std::to_string(h);
        return false;
      }
    }
  }
  return true;
}

bool conservation_holds(const RunResult& r, std::string* detail) {
  for (const auto& p : r.peers) {
    if (p.byz != peer::ByzKind::None) continue;
    if (p.delivered != p.block_txns + p.aborted + p.unprocessed) {
      if (detail)
        *detail = "peer " + std::to_string(p.id) + ": delivered " +
                  std::to_string(p.delivered) + " != " +
                  std::to_string(p.block_txns) + " in blocks + " +
                  std::to_string(p.aborted) + " aborted + " +
                  std::to_string(p.unprocessed) + " queued";
      return false;
    }
  }
  return true;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

void write_metrics_csv(std::ostream& out, const RunResult& r) {
  out << "episode,action,arch,block_size,early,dep,slow_path,start_ms,end_ms,"
         "blocks,valid,invalidated,early_aborted,episode_aborted,"
         "ordering_rejected,local_p,agreed_e_ms,agreed_p,tip_hash\n";
  for (const auto& e : r.reference().episodes) {
    out << e.episode << ',' << e.action << ',' << e.config.name() << ','
        << e.config.block_size << ',' << (e.config.early_execution ? 1 : 0)
        << ',' << (e.config.dep_graph ? 1 : 0) << ',' << (e.slow_path ? 1 : 0)
        << ',' << fmt(us_to_ms(e.start)) << ',' << fmt(us_to_ms(e.end)) << ','
        << e.blocks << ',' << e.valid << ',' << e.invalidated << ','
        << e.early_aborted << ',' << e.episode_aborted << ','
        << e.ordering_rejected << ',' << fmt(e.local_p) << ','
        << fmt(e.agreed_e) << ',' << fmt(e.agreed_p) << ','
        << to_hex(e.tip_hash) << '\n';
  }
}

void write_cumulative_csv(std::ostream& out, const RunResult& r) {
  out << "episode,end_s,cumulative_valid,cumulative_throughput\n";
  uint64_t cum = 0;
  for (const auto& e : r.reference().episodes) {
    cum += e.valid;
    double end_s = us_to_seconds(e.end);
    out << e.episode << ',' << fmt(end_s) << ',' << cum << ','
        << fmt(end_s > 0 ? static_cast<double>(cum) / end_s : 0) << '\n';
  }
}

void write_overhead_csv(std::ostream& out, const RunResult& r) {
  out << "episode,featurize_us,communicate_us,train_us,infer_us,episode_us\n";
  for (const auto& e : r.reference().episodes) {
    out << e.episode << ',' << e.featurize_wall << ',' << e.communicate_sim
        << ',' << e.train_wall << ',' << e.infer_wall << ','
        << (e.end - e.start) << '\n';
  }
}

void write_overhead_summary_csv(std::ostream& out, const RunResult& r) {
  struct Stage {
    const char* name;
    std::vector<double> vals;
  };
  Stage stages[5] = {{"featurize", {}},
                     {"communicate", {}},
                     {"train", {}},
                     {"infer", {}},
                     {"episode", {}}};
  for (const auto& e : r.reference().episodes) {
    stages[0].vals.push_back(static_cast<double>(e.featurize_wall));
    stages[1].vals.push_back(static_cast<double>(e.communicate_sim));
    stages[2].vals.push_back(static_cast<double>(e.train_wall));
    stages[3].vals.push_back(static_cast<double>(e.infer_wall));
    stages[4].vals.push_back(static_cast<double>(e.end - e.start));
  }
  out << "stage,mean_us,median_us,max_us\n";
  for (auto& s : stages) {
    if (s.vals.empty()) {
      out << s.name << ",0,0,0\n";
      continue;
    }
    std::sort(s.vals.begin(), s.vals.end());
    double sum = 0;
    for (double v : s.vals) sum += v;
    out << s.name << ',' << fmt(sum / static_cast<double>(s.vals.size())) << ','
        << fmt(s.vals[(s.vals.size() - 1) / 2]) << ',' << fmt(s.vals.back())
        << '\n';
  }
}

std::string metrics_csv(const RunResult& r) {
  std::ostringstream ss;
  write_metrics_csv(ss, r);
  return ss.str();
}

std::string cumulative_csv(const RunResult& r) {
  std::ostringstream ss;
  write_cumulative_csv(ss, r);
  return ss.str();
}

std::vector<GridCell> grid_search(const ExperimentConfig& base,
                                  unsigned parallelism) {
  const auto& actions = exec::enumerate_actions();
  if (parallelism == 0)
    parallelism = std::max(1u, std::thread::hardware_concurrency());
  std::vector<GridCell> grid(actions.size());
  auto run_cell = [&](size_t i) {
    ExperimentConfig c = base;
    c.mode.kind = peer::ModeSpec::Kind::Fixed;
    c.mode.fixed_action = static_cast<int>(i);
    c.mode.forced.clear();
    RunResult r = run_experiment(c);
    GridCell cell;
    cell.action = static_cast<int>(i);
    cell.config = actions[i];
    const auto& eps = r.reference().episodes;
    cell.episodes = eps.size();
    for (const auto& e : eps)
      if (e.slow_path) cell.slow_paths++;
    // Sustained rate: committed-valid transactions over the offered-load
    // window. Per-episode rates are misleading here because an episode that
    // drains a backlog built up earlier reports a burst far above the
    // arrival rate.
    uint64_t valid = 0;
    for (const auto& b : r.ledgers[r.reference_peer].blocks())
      for (const auto& t : b.txns)
        if (t.validity == core::Validity::CommittedValid) valid++;
    cell.mean_throughput = static_cast<double>(valid) /
                           us_to_seconds(c.schedule.total_duration());
    grid[i] = cell;
  };
  std::vector<std::future<void>> futures;
  std::atomic<size_t> next{0};
  for (unsigned w = 0; w < parallelism; w++) {
    futures.push_back(std::async(std::launch::async, [&] {
      while (true) {
        size_t i = next.fetch_add(1);
        if (i >= actions.size()) return;
        run_cell(i);
      }
    }));
  }
  for (auto& f : futures) f.get();
  return grid;
}

void write_grid_csv(std::ostream& out, const std::vector<GridCell>& grid) {
  out << "action,arch,block_size,early,dep,episodes,slow_paths,"
         "mean_throughput\n";
  for (const auto& c : grid) {
    out << c.action << ',' << c.config.name() << ',' << c.config.block_size
        << ',' << (c.config.early_execution ? 1 : 0) << ','
        << (c.config.dep_graph ? 1 : 0) << ',' << c.episodes << ','
        << c.slow_paths << ',' << fmt(c.mean_throughput) << '\n';
  }
}

}  // namespace chainlab::harness
