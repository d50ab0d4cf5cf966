#include "chainlab/learn/agent.hpp"

#include <algorithm>
#include <chrono>
#include <random>
#include <unordered_map>
#include <unordered_set>

namespace chainlab::learn {

namespace {

TimeUs wall_now() {
  return std::chrono::duration_cast<std::chrono::microseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

constexpr TimeUs kArrivalSpanFloor = kMillisecond;

}  // namespace

proto::Features featurize(const std::vector<const core::Block*>& window) {
  proto::Features f;
  uint64_t txns = 0, writes = 0;
  uint64_t accesses = 0;
  std::unordered_map<Key, uint64_t> per_key;
  TimeUs first = 0, last = 0;
  double delay_sum = 0;
  bool any = false;
  for (const core::Block* b : window) {
    for (const auto& t : b->txns) {
      txns++;
      if (core::is_modifying(t.kind)) writes++;
      std::unordered_set<Key> keys;
      for (const auto& r : t.read_set) keys.insert(r.key);
      for (const auto& w : t.write_set) keys.insert(w.key);
      for (Key k : keys) {
        per_key[k]++;
        accesses++;
      }
      if (!any || t.arrival_ts < first) first = t.arrival_ts;
      if (!any || t.arrival_ts > last) last = t.arrival_ts;
      any = true;
      delay_sum += us_to_ms(t.measured_delay);
    }
  }
  if (txns == 0) return f;
  f.write_ratio = static_cast<double>(writes) / static_cast<double>(txns);
  uint64_t hottest = 0;
  for (const auto& [k, c] : per_key) hottest = std::max(hottest, c);
  if (accesses > 0)
    f.hot_key_ratio = static_cast<double>(hottest) / static_cast<double>(accesses);
  TimeUs span = std::max(last - first, kArrivalSpanFloor);
  f.arrival_rate = static_cast<double>(txns) / us_to_seconds(span);
  f.exec_delay_ms = delay_sum / static_cast<double>(txns);
  return f;
}

Agent::Agent(uint64_t run_seed, ForestParams params)
    : run_seed_(run_seed), params_(params), actions_(exec::enumerate_actions()) {}

FeatureVec Agent::encode(const proto::Features& s,
                         const exec::ArchitectureConfig& a) {
  return FeatureVec{s.write_ratio,
                    s.hot_key_ratio,
                    s.arrival_rate,
                    s.exec_delay_ms,
                    static_cast<double>(a.block_size),
                    a.early_execution ? 1.0 : 0.0,
                    a.dep_graph ? 1.0 : 0.0};
}

void Agent::record(uint64_t episode, const proto::Features& state,
                   const exec::ArchitectureConfig& action, double reward) {
  for (const auto& e : experience_)
    if (e.episode == episode) return;
  experience_.push_back(ExperienceEntry{episode, state, action, reward});
}

exec::ArchitectureConfig Agent::select(const proto::Features& state,
                                       uint64_t next_episode,
                                       AgentTimings* timings) {
  if (experience_.empty()) {
    // Cold start: uniform choice from a seed every peer shares.
    std::mt19937_64 rng(mix_seed(run_seed_, 0xc01d ^ next_episode));
    std::uniform_int_distribution<size_t> d(0, actions_.size() - 1);
    return actions_[d(rng)];
  }

  TimeUs t0 = wall_now();
  const size_t n = experience_.size();
  std::mt19937_64 boot_rng(mix_seed(run_seed_, 0xb007 ^ next_episode));
  std::uniform_int_distribution<size_t> pick(0, n - 1);
  std::vector<FeatureVec> x;
  std::vector<double> y;
  x.reserve(n);
  y.reserve(n);
  for (size_t i = 0; i < n; i++) {
    const auto& e = experience_[pick(boot_rng)];
    x.push_back(encode(e.state, e.action));
    y.push_back(e.reward);
  }
  auto forest =
      RandomForest::train(x, y, params_, mix_seed(run_seed_, 0xf17 ^ next_episode));
  TimeUs t1 = wall_now();

  double best = 0;
  std::vector<size_t> best_ids;
  for (size_t i = 0; i < actions_.size(); i++) {
    double v = forest.predict(encode(state, actions_[i]));
    if (best_ids.empty() || v > best) {
      best = v;
      best_ids.assign(1, i);
    } else if (v == best) {
      best_ids.push_back(i);
    }
  }
  std::mt19937_64 tie_rng(mix_seed(run_seed_, 0x713 ^ next_episode));
  std::uniform_int_distribution<size_t> d(0, best_ids.size() - 1);
  size_t choice = best_ids[d(tie_rng)];
  TimeUs t2 = wall_now();
  if (timings) {
    timings->train_wall = t1 - t0;
    timings->infer_wall = t2 - t1;
  }
  return actions_[choice];
}

double Agent::predict(const proto::Features& state,
                      const exec::ArchitectureConfig& action,
                      uint64_t episode) const {
  std::vector<FeatureVec> x;
  std::vector<double> y;
  for (const auto& e : experience_) {
    x.push_back(encode(e.state, e.action));
    y.push_back(e.reward);
  }
  auto forest = RandomForest::train(x, y, params_, mix_seed(run_seed_, 0xf17 ^ episode));
  return forest.predict(encode(state, action));
}

}  // namespace chainlab::learn
