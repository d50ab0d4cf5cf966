#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chainlab/common.hpp"
#include "chainlab/core/types.hpp"

namespace chainlab::core {

Digest sha256(const uint8_t* data, size_t len);
Digest sha256(const std::vector<uint8_t>& data);

// Keyed authenticator over message bytes (HMAC-SHA256). Pluggable via
// AuthMode so protocol tests can run without MAC computation.
Digest hmac_sha256(const std::string& key, const uint8_t* data, size_t len);

// Little-endian byte writer for the canonical serializations used by block
// hashing and the protocol wire format.
class ByteWriter {
 public:
  void u8(uint8_t v) { buf_.push_back(v); }
  void u32(uint32_t v);
  void u64(uint64_t v);
  void i64(int64_t v) { u64(static_cast<uint64_t>(v)); }
  void f64(double v);
  void bytes(const uint8_t* p, size_t n) { buf_.insert(buf_.end(), p, p + n); }
  void digest(const Digest& d) { bytes(d.data(), d.size()); }

  const std::vector<uint8_t>& data() const { return buf_; }
  size_t size() const { return buf_.size(); }

 private:
  std::vector<uint8_t> buf_;
};

class ByteReader {
 public:
  ByteReader(const uint8_t* p, size_t n) : p_(p), end_(p + n) {}
  explicit ByteReader(const std::vector<uint8_t>& v)
      : ByteReader(v.data(), v.size()) {}

  uint8_t u8();
  uint32_t u32();
  uint64_t u64();
  int64_t i64() { return static_cast<int64_t>(u64()); }
  double f64();
  Digest digest();
  size_t remaining() const { return static_cast<size_t>(end_ - p_); }

 private:
  void need(size_t n);
  const uint8_t* p_;
  const uint8_t* end_;
};

// Canonical digest over (index, prev_hash, then per-txn id/kind/write_set/
// validity). Any change to ids, order, writes, validity, or prev_hash
// changes the digest.
Digest hash_block(const Block& b);

}  // namespace chainlab::core
