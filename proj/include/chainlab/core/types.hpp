#pragma once

#include <cstdint>
#include <vector>

#include "chainlab/common.hpp"

namespace chainlab::core {

// SmallBank-style operation kinds. The first five modify state, Balance is
// read-only.
enum class TxnKind : uint8_t {
  TransactSavings = 0,
  DepositChecking = 1,
  SendPayment = 2,
  WriteCheck = 3,
  Amalgamate = 4,
  Balance = 5,
};

inline bool is_modifying(TxnKind k) { return k != TxnKind::Balance; }

enum class Validity : uint8_t {
  Pending = 0,
  CommittedValid = 1,
  Invalidated = 2,
  EarlyAborted = 3,
  EpisodeAborted = 4,
};

const char* to_string(TxnKind k);
const char* to_string(Validity v);

struct ReadEntry {
  Key key = 0;
  uint64_t version = 0;  // block index of the last committed write seen
};

struct WriteEntry {
  Key key = 0;
  int64_t value = 0;
};

struct Transaction {
  uint64_t id = 0;
  TxnKind kind = TxnKind::Balance;

  // Semantic payload: account references and transfer amount. The read and
  // write sets below are derived from these during simulation or execution.
  uint64_t acct_a = 0;
  uint64_t acct_b = 0;
  int64_t amount = 0;

  TimeUs compute_delay = 0;  // simulated pure-compute time
  TimeUs arrival_ts = 0;     // stamped by the client at submission
  uint64_t episode_tag = 0;  // assigned by the leader when the batch is cut

  bool simulated = false;  // read/write sets populated by early simulation
  std::vector<ReadEntry> read_set;
  std::vector<WriteEntry> write_set;

  Validity validity = Validity::Pending;
  TimeUs measured_delay = 0;  // execution/simulation delay actually consumed
};

struct Block {
  uint64_t index = 0;  // monotone height, genesis is height 0 (no block)
  uint64_t episode = 0;
  Digest prev_hash{};
  Digest hash{};
  std::vector<Transaction> txns;
};

// Declared key footprint, known statically from the transaction parameters.
// OXII builds its dependency graph from these before execution.
std::vector<Key> declared_reads(const Transaction& t);
std::vector<Key> declared_writes(const Transaction& t);

}  // namespace chainlab::core
