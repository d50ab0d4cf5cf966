#include "chainlab/core/hash.hpp"

#include <openssl/hmac.h>
#include <openssl/sha.h>

#include <cstring>
#include <stdexcept>

namespace chainlab {

std::string to_hex(const Digest& d) {
  static const char* hexd = "0123456789abcdef";
  std::string out;
  out.reserve(64);
  for (uint8_t b : d) {
    out.push_back(hexd[b >> 4]);
    out.push_back(hexd[b & 0xf]);
  }
  return out;
}

uint64_t mix_seed(uint64_t seed, uint64_t stream) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace chainlab

namespace chainlab::core {

Digest sha256(const uint8_t* data, size_t len) {
  Digest out{};
  SHA256(data, len, out.data());
  return out;
}

Digest sha256(const std::vector<uint8_t>& data) {
  return sha256(data.data(), data.size());
}

Digest hmac_sha256(const std::string& key, const uint8_t* data, size_t len) {
  Digest out{};
  unsigned int outlen = 0;
  HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), data, len,
       out.data(), &outlen);
  return out;
}

void ByteWriter::u32(uint32_t v) {
  for (int i = 0; i < 4; i++) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void ByteWriter::u64(uint64_t v) {
  for (int i = 0; i < 8; i++) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void ByteWriter::f64(double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  u64(bits);
}

void ByteReader::need(size_t n) {
  if (remaining() < n) throw std::runtime_error("byte reader underflow");
}

uint8_t ByteReader::u8() {
  need(1);
  return *p_++;
}

uint32_t ByteReader::u32() {
  need(4);
  uint32_t v = 0;
  for (int i = 0; i < 4; i++) v |= static_cast<uint32_t>(*p_++) << (8 * i);
  return v;
}

uint64_t ByteReader::u64() {
  need(8);
  uint64_t v = 0;
  for (int i = 0; i < 8; i++) v |= static_cast<uint64_t>(*p_++) << (8 * i);
  return v;
}

double ByteReader::f64() {
  uint64_t bits = u64();
  double v;
  std::memcpy(&v, &bits, sizeof(v));
  return v;
}

Digest ByteReader::digest() {
  need(32);
  Digest d{};
  std::memcpy(d.data(), p_, 32);
  p_ += 32;
  return d;
}

Digest hash_block(const Block& b) {
  ByteWriter w;
  w.u64(b.index);
  w.digest(b.prev_hash);
  w.u32(static_cast<uint32_t>(b.txns.size()));
  for (const auto& t : b.txns) {
    w.u64(t.id);
    w.u8(static_cast<uint8_t>(t.kind));
    w.u32(static_cast<uint32_t>(t.write_set.size()));
    for (const auto& we : t.write_set) {
      w.u64(we.key);
      w.i64(we.value);
    }
    w.u8(static_cast<uint8_t>(t.validity));
  }
  return sha256(w.data());
}

const char* to_string(TxnKind k) {
  switch (k) {
    case TxnKind::TransactSavings: return "transact_savings";
    case TxnKind::DepositChecking: return "deposit_checking";
    case TxnKind::SendPayment: return "send_payment";
    case TxnKind::WriteCheck: return "write_check";
    case TxnKind::Amalgamate: return "amalgamate";
    case TxnKind::Balance: return "balance";
  }
  return "?";
}

const char* to_string(Validity v) {
  switch (v) {
    case Validity::Pending: return "pending";
    case Validity::CommittedValid: return "valid";
    case Validity::Invalidated: return "invalidated";
    case Validity::EarlyAborted: return "early_aborted";
    case Validity::EpisodeAborted: return "episode_aborted";
  }
  return "?";
}

}  // namespace chainlab::core
