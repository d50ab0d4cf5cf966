#include "chainlab/proto/messages.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

#include "chainlab/core/hash.hpp"

namespace chainlab::proto {

using core::ByteReader;
using core::ByteWriter;

const char* to_string(MsgType t) {
  switch (t) {
    case MsgType::Submit: return "SUBMIT";
    case MsgType::Forward: return "FORWARD";
    case MsgType::Batch: return "BATCH";
    case MsgType::Checkpoint: return "CHECKPOINT";
    case MsgType::Propose: return "PROPOSE";
    case MsgType::Accept: return "ACCEPT";
    case MsgType::Commit: return "COMMIT";
    case MsgType::SCheckpoint: return "S-CHECKPOINT";
    case MsgType::SPropose: return "S-PROPOSE";
    case MsgType::SAccept: return "S-ACCEPT";
    case MsgType::SCommit: return "S-COMMIT";
  }
  return "?";
}

namespace {

void write_txn(ByteWriter& w, const core::Transaction& t) {
  w.u64(t.id);
  w.u8(static_cast<uint8_t>(t.kind));
  w.u64(t.acct_a);
  w.u64(t.acct_b);
  w.i64(t.amount);
  w.i64(t.compute_delay);
  w.i64(t.arrival_ts);
  w.u64(t.episode_tag);
  w.u8(t.simulated ? 1 : 0);
  w.u32(static_cast<uint32_t>(t.read_set.size()));
  for (const auto& r : t.read_set) {
    w.u64(r.key);
    w.u64(r.version);
  }
  w.u32(static_cast<uint32_t>(t.write_set.size()));
  for (const auto& e : t.write_set) {
    w.u64(e.key);
    w.i64(e.value);
  }
  w.u8(static_cast<uint8_t>(t.validity));
  w.i64(t.measured_delay);
}

core::Transaction read_txn(ByteReader& r) {
  core::Transaction t;
  t.id = r.u64();
  t.kind = static_cast<core::TxnKind>(r.u8());
  t.acct_a = r.u64();
  t.acct_b = r.u64();
  t.amount = r.i64();
  t.compute_delay = r.i64();
  t.arrival_ts = r.i64();
  t.episode_tag = r.u64();
  t.simulated = r.u8() != 0;
  uint32_t nr = r.u32();
  t.read_set.resize(nr);
  for (auto& e : t.read_set) {
    e.key = r.u64();
    e.version = r.u64();
  }
  uint32_t nw = r.u32();
  t.write_set.resize(nw);
  for (auto& e : t.write_set) {
    e.key = r.u64();
    e.value = r.i64();
  }
  t.validity = static_cast<core::Validity>(r.u8());
  t.measured_delay = r.i64();
  return t;
}

void write_features(ByteWriter& w, const Features& f) {
  w.f64(f.write_ratio);
  w.f64(f.hot_key_ratio);
  w.f64(f.arrival_rate);
  w.f64(f.exec_delay_ms);
}

Features read_features(ByteReader& r) {
  Features f;
  f.write_ratio = r.f64();
  f.hot_key_ratio = r.f64();
  f.arrival_rate = r.f64();
  f.exec_delay_ms = r.f64();
  return f;
}

void write_body(ByteWriter& w, const Message& m) {
  w.u8(static_cast<uint8_t>(m.type));
  w.u32(m.sender);
  w.u32(m.view);
  w.u64(m.episode);
  switch (m.type) {
    case MsgType::Submit:
    case MsgType::Forward:
      write_txn(w, m.txn);
      break;
    case MsgType::Batch:
      w.u64(m.batch.seq);
      w.u64(m.batch.episode);
      w.u32(static_cast<uint32_t>(m.batch.txns.size()));
      for (const auto& t : m.batch.txns) write_txn(w, t);
      w.u32(static_cast<uint32_t>(m.batch.purged.size()));
      for (const auto& t : m.batch.purged) write_txn(w, t);
      break;
    case MsgType::Checkpoint:
      write_features(w, m.features);
      w.f64(m.e);
      w.f64(m.p);
      break;
    case MsgType::Propose:
    case MsgType::Accept:
    case MsgType::Commit:
      w.f64(m.e);
      w.f64(m.p);
      break;
    case MsgType::SCheckpoint:
      w.u64(m.b_last);
      break;
    case MsgType::SPropose:
    case MsgType::SAccept:
    case MsgType::SCommit:
      w.u64(m.watermark);
      break;
  }
  if (m.type == MsgType::Propose || m.type == MsgType::SPropose) {
    w.u32(static_cast<uint32_t>(m.certificate.size()));
    for (const auto& c : m.certificate) {
      auto bytes = c.encode();
      w.u32(static_cast<uint32_t>(bytes.size()));
      w.bytes(bytes.data(), bytes.size());
    }
  }
}

}  // namespace

std::vector<uint8_t> Message::encode_unsigned() const {
  ByteWriter w;
  write_body(w, *this);
  return w.data();
}

std::vector<uint8_t> Message::encode() const {
  ByteWriter w;
  write_body(w, *this);
  w.digest(auth);
  return w.data();
}

Message Message::decode(const std::vector<uint8_t>& bytes) {
  ByteReader r(bytes);
  Message m;
  m.type = static_cast<MsgType>(r.u8());
  m.sender = r.u32();
  m.view = r.u32();
  m.episode = r.u64();
  switch (m.type) {
    case MsgType::Submit:
    case MsgType::Forward:
      m.txn = read_txn(r);
      break;
    case MsgType::Batch: {
      m.batch.seq = r.u64();
      m.batch.episode = r.u64();
      uint32_t n = r.u32();
      m.batch.txns.reserve(n);
      for (uint32_t i = 0; i < n; i++) m.batch.txns.push_back(read_txn(r));
      uint32_t np = r.u32();
      m.batch.purged.reserve(np);
      for (uint32_t i = 0; i < np; i++) m.batch.purged.push_back(read_txn(r));
      break;
    }
    case MsgType::Checkpoint:
      m.features = read_features(r);
      m.e = r.f64();
      m.p = r.f64();
      break;
    case MsgType::Propose:
    case MsgType::Accept:
    case MsgType::Commit:
      m.e = r.f64();
      m.p = r.f64();
      break;
    case MsgType::SCheckpoint:
      m.b_last = r.u64();
      break;
    case MsgType::SPropose:
    case MsgType::SAccept:
    case MsgType::SCommit:
      m.watermark = r.u64();
      break;
  }
  if (m.type == MsgType::Propose || m.type == MsgType::SPropose) {
    uint32_t n = r.u32();
    m.certificate.reserve(n);
    for (uint32_t i = 0; i < n; i++) {
      uint32_t len = r.u32();
      std::vector<uint8_t> inner(len);
      for (uint32_t b = 0; b < len; b++) inner[b] = r.u8();
      m.certificate.push_back(Message::decode(inner));
    }
  }
  m.auth = r.digest();
  if (r.remaining() != 0) throw std::runtime_error("trailing bytes in message");
  return m;
}

Authenticator::Authenticator(Mode mode, uint64_t run_seed, uint32_t node_count)
    : mode_(mode) {
  keys_.reserve(node_count);
  for (uint32_t i = 0; i < node_count; i++)
    keys_.push_back("node-" + std::to_string(i) + "-" +
                    std::to_string(mix_seed(run_seed, 0xa07 + i)));
}

void Authenticator::sign(Message& m) const {
  if (mode_ == Mode::None) {
    m.auth = Digest{};
    return;
  }
  if (m.sender >= keys_.size()) throw std::out_of_range("unknown signer");
  auto body = m.encode_unsigned();
  m.auth = core::hmac_sha256(keys_[m.sender], body.data(), body.size());
}

bool Authenticator::verify(const Message& m) const {
  if (mode_ == Mode::None) return true;
  if (m.sender >= keys_.size()) return false;
  auto body = m.encode_unsigned();
  return core::hmac_sha256(keys_[m.sender], body.data(), body.size()) == m.auth;
}

double lower_median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty set");
  std::sort(values.begin(), values.end());
  return values[(values.size() - 1) / 2];
}

namespace {

bool check_certificate(const Message& propose, MsgType expected, uint32_t f,
                       const Authenticator& auth) {
  if (propose.certificate.size() != 2 * f + 1) return false;
  std::unordered_set<uint32_t> senders;
  for (const auto& c : propose.certificate) {
    if (c.type != expected) return false;
    if (c.episode != propose.episode) return false;
    if (!senders.insert(c.sender).second) return false;
    if (!auth.verify(c)) return false;
  }
  return true;
}

}  // namespace

bool validate_propose(const Message& propose, uint32_t f,
                      const Authenticator& auth) {
  if (propose.type != MsgType::Propose) return false;
  if (!check_certificate(propose, MsgType::Checkpoint, f, auth)) return false;
  std::vector<double> es, ps;
  for (const auto& c : propose.certificate) {
    es.push_back(c.e);
    ps.push_back(c.p);
  }
  return propose.e == lower_median(std::move(es)) &&
         propose.p == lower_median(std::move(ps));
}

bool validate_s_propose(const Message& propose, uint32_t f,
                        const Authenticator& auth, uint64_t watermark_cap) {
  if (propose.type != MsgType::SPropose) return false;
  if (!check_certificate(propose, MsgType::SCheckpoint, f, auth)) return false;
  uint64_t max_b = 0;
  for (const auto& c : propose.certificate) max_b = std::max(max_b, c.b_last);
  return propose.watermark == std::min(max_b, watermark_cap);
}

}  // namespace chainlab::proto
