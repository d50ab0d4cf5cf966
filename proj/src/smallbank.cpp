#include "chainlab/workload/smallbank.hpp"

#include <stdexcept>

namespace chainlab::core {

std::vector<Key> declared_reads(const Transaction& t) {
  using workload::key_checking;
  using workload::key_savings;
  switch (t.kind) {
    case TxnKind::TransactSavings:
      return {key_savings(t.acct_a)};
    case TxnKind::DepositChecking:
      return {key_checking(t.acct_a)};
    case TxnKind::SendPayment:
      return {key_checking(t.acct_a), key_checking(t.acct_b)};
    case TxnKind::WriteCheck:
      return {key_savings(t.acct_a), key_checking(t.acct_a)};
    case TxnKind::Amalgamate:
      return {key_savings(t.acct_a), key_checking(t.acct_a),
              key_checking(t.acct_b)};
    case TxnKind::Balance:
      return {key_savings(t.acct_a), key_checking(t.acct_a)};
  }
  return {};
}

std::vector<Key> declared_writes(const Transaction& t) {
  using workload::key_checking;
  using workload::key_savings;
  switch (t.kind) {
    case TxnKind::TransactSavings:
      return {key_savings(t.acct_a)};
    case TxnKind::DepositChecking:
      return {key_checking(t.acct_a)};
    case TxnKind::SendPayment:
      return {key_checking(t.acct_a), key_checking(t.acct_b)};
    case TxnKind::WriteCheck:
      return {key_checking(t.acct_a)};
    case TxnKind::Amalgamate:
      return {key_savings(t.acct_a), key_checking(t.acct_b)};
    case TxnKind::Balance:
      return {};
  }
  return {};
}

}  // namespace chainlab::core

namespace chainlab::workload {

using core::Transaction;
using core::TxnKind;
using core::WriteEntry;

std::vector<WriteEntry> compute_writes(
    const Transaction& t, const std::function<int64_t(Key)>& read) {
  switch (t.kind) {
    case TxnKind::TransactSavings:
      return {{key_savings(t.acct_a), read(key_savings(t.acct_a)) + t.amount}};
    case TxnKind::DepositChecking:
      return {{key_checking(t.acct_a), read(key_checking(t.acct_a)) + t.amount}};
    case TxnKind::SendPayment:
      return {{key_checking(t.acct_a), read(key_checking(t.acct_a)) - t.amount},
              {key_checking(t.acct_b), read(key_checking(t.acct_b)) + t.amount}};
    case TxnKind::WriteCheck: {
      (void)read(key_savings(t.acct_a));
      return {{key_checking(t.acct_a), read(key_checking(t.acct_a)) - t.amount}};
    }
    case TxnKind::Amalgamate: {
      int64_t total = read(key_savings(t.acct_a)) + read(key_checking(t.acct_a));
      return {{key_savings(t.acct_a), 0},
              {key_checking(t.acct_b), read(key_checking(t.acct_b)) + total}};
    }
    case TxnKind::Balance:
      (void)read(key_savings(t.acct_a));
      (void)read(key_checking(t.acct_a));
      return {};
  }
  return {};
}

WorkloadParams preset(char name) {
  switch (name) {
    case 'A': return {0.2, 0.95, 5, 300, 50 * kMillisecond, 5 * kMillisecond};
    case 'B': return {0.5, 0.99, 10, 100, 50 * kMillisecond, 1 * kMillisecond};
    case 'C': return {0.5, 0.1, 10, 300, 50 * kMillisecond, 10 * kMillisecond};
    case 'D': return {0.9, 0.95, 1, 100, 50 * kMillisecond, 0};
    case 'E': return {0.5, 0.99, 10, 100, 50 * kMillisecond, 5 * kMillisecond};
    default: throw std::invalid_argument("unknown workload preset");
  }
}

bool is_preset_name(const std::string& s) {
  return s.size() == 1 && s[0] >= 'A' && s[0] <= 'E';
}

TimeUs WorkloadSchedule::total_duration() const {
  TimeUs total = 0;
  for (const auto& seg : segments) total += seg.duration;
  return total;
}

const WorkloadParams& WorkloadSchedule::at(TimeUs t) const {
  if (segments.empty()) throw std::logic_error("empty schedule");
  TimeUs acc = 0;
  for (const auto& seg : segments) {
    acc += seg.duration;
    if (t < acc) return seg.params;
  }
  return segments.back().params;
}

core::WorldState preload(uint64_t user_count, uint64_t seed) {
  core::WorldState state;
  std::mt19937_64 rng(mix_seed(seed, 0xb0a7));
  std::uniform_int_distribution<int64_t> bal(1000, 100000);
  for (uint64_t u = 0; u < user_count; u++) {
    state.preload(key_savings(u), bal(rng));
    state.preload(key_checking(u), bal(rng));
  }
  return state;
}

TxnGenerator::TxnGenerator(uint64_t user_count, uint64_t seed)
    : user_count_(user_count), rng_(mix_seed(seed, 0x7a9)) {}

uint64_t TxnGenerator::pick_account(const WorkloadParams& params) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (params.n_hot > 0 && coin(rng_) < params.p_hot) {
    std::uniform_int_distribution<uint64_t> hot(0, params.n_hot - 1);
    return hot(rng_);
  }
  if (params.n_hot >= user_count_) return 0;
  std::uniform_int_distribution<uint64_t> cold(params.n_hot, user_count_ - 1);
  return cold(rng_);
}

Transaction TxnGenerator::next(const WorkloadParams& params) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  Transaction t;
  t.id = ++next_id_;
  if (coin(rng_) < params.p_write) {
    std::uniform_int_distribution<int> kind(0, 4);
    t.kind = static_cast<TxnKind>(kind(rng_));
  } else {
    t.kind = TxnKind::Balance;
  }
  t.acct_a = pick_account(params);
  t.acct_b = t.acct_a;
  if (t.kind == TxnKind::SendPayment || t.kind == TxnKind::Amalgamate) {
    // Distinct second account, keeps the footprint honest.
    for (int tries = 0; tries < 8 && t.acct_b == t.acct_a; tries++)
      t.acct_b = pick_account(params);
    if (t.acct_b == t.acct_a) t.acct_b = (t.acct_a + 1) % user_count_;
  }
  std::uniform_int_distribution<int64_t> amt(1, 100);
  t.amount = amt(rng_);
  t.compute_delay = params.t_compute;
  return t;
}

}  // namespace chainlab::workload
