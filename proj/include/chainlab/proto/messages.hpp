#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chainlab/common.hpp"
#include "chainlab/core/types.hpp"

namespace chainlab::proto {

enum class MsgType : uint8_t {
  Submit = 1,        // client -> entry peer
  Forward = 2,       // entry peer -> leader
  Batch = 3,         // leader -> all peers
  Checkpoint = 4,    // measurement report, start of the learning phase
  Propose = 5,       // leader's median (e, p) with justification
  Accept = 6,
  Commit = 7,
  SCheckpoint = 8,   // timeout path: last committed block height
  SPropose = 9,      // leader's max height with justification
  SAccept = 10,
  SCommit = 11,
};

const char* to_string(MsgType t);

// Workload measurement vector. `exec_delay_ms` is the mean per-transaction
// compute time in milliseconds; `arrival_rate` is txns per second.
struct Features {
  double write_ratio = 0;
  double hot_key_ratio = 0;
  double arrival_rate = 0;
  double exec_delay_ms = 0;

  bool operator==(const Features&) const = default;
};

struct OrderedBatch {
  uint64_t seq = 0;      // global delivery sequence, contiguous from 1
  uint64_t episode = 0;  // tag stamped at cut time
  std::vector<core::Transaction> txns;
  // Ordering-phase early aborts (reorder architectures only): transactions
  // whose reads were already stale at cut time. They never occupy a block
  // slot; every peer moves them straight to its abort log on delivery.
  std::vector<core::Transaction> purged;
  uint32_t purged_count = 0;  // set on delivery, after purged is drained
};

struct Message {
  MsgType type = MsgType::Submit;
  uint32_t sender = 0;   // peer id; clients use peer_count
  uint32_t view = 0;
  uint64_t episode = 0;

  core::Transaction txn;              // Submit, Forward
  OrderedBatch batch;                 // Batch
  Features features;                  // Checkpoint
  double e = 0;                       // Checkpoint/Propose/Accept/Commit
  double p = 0;                       // Checkpoint/Propose/Accept/Commit
  uint64_t b_last = 0;                // SCheckpoint
  uint64_t watermark = 0;             // SPropose/SAccept/SCommit
  std::vector<Message> certificate;   // Propose: 2f+1 Checkpoints;
                                      // SPropose: 2f+1 SCheckpoints

  Digest auth{};  // authenticator over everything above

  // Canonical wire encoding; the authenticator is appended last.
  std::vector<uint8_t> encode_unsigned() const;
  std::vector<uint8_t> encode() const;
  size_t wire_size() const { return encode().size(); }

  static Message decode(const std::vector<uint8_t>& bytes);
};

// Pairwise symmetric authenticators. Mode None zeroes the tag and accepts
// everything, so protocol logic can be exercised without MAC cost.
class Authenticator {
 public:
  enum class Mode { None, Hmac };

  Authenticator(Mode mode, uint64_t run_seed, uint32_t node_count);

  void sign(Message& m) const;
  bool verify(const Message& m) const;

  Mode mode() const { return mode_; }

 private:
  Mode mode_;
  std::vector<std::string> keys_;
};

// Lower median over an odd or even count: element at index (n-1)/2 of the
// sorted values.
double lower_median(std::vector<double> values);

// Checks a Propose against its justification: 2f+1 Checkpoints from
// distinct senders for the same episode, valid authenticators, and (e, p)
// equal to the lower medians over the justification.
bool validate_propose(const Message& propose, uint32_t f,
                      const Authenticator& auth);

// Checks an SPropose: 2f+1 SCheckpoints from distinct senders for the same
// episode, valid authenticators, and watermark equal to the max b_last,
// capped at `watermark_cap` (the episode's planned end, so an inflated
// report cannot push the agreed end past it).
bool validate_s_propose(const Message& propose, uint32_t f,
                        const Authenticator& auth, uint64_t watermark_cap);

}  // namespace chainlab::proto
