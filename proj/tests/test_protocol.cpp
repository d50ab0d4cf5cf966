#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "chainlab/proto/messages.hpp"

using namespace chainlab;
using namespace chainlab::core;
using namespace chainlab::proto;

namespace {

Transaction sample_txn() {
  Transaction t;
  t.id = 42;
  t.kind = TxnKind::SendPayment;
  t.acct_a = 3;
  t.acct_b = 9;
  t.amount = 55;
  t.compute_delay = 1500;
  t.arrival_ts = 123456;
  t.episode_tag = 4;
  t.simulated = true;
  t.read_set = {ReadEntry{6, 2}, ReadEntry{18, 0}};
  t.write_set = {WriteEntry{7, -12}, WriteEntry{19, 1000}};
  t.validity = Validity::CommittedValid;
  t.measured_delay = 1499;
  return t;
}

Message checkpoint(uint32_t sender, uint64_t episode, double e, double p) {
  Message m;
  m.type = MsgType::Checkpoint;
  m.sender = sender;
  m.episode = episode;
  m.features = Features{0.5, 0.9, 2000.0, e};
  m.e = e;
  m.p = p;
  return m;
}

Message s_checkpoint(uint32_t sender, uint64_t episode, uint64_t b_last) {
  Message m;
  m.type = MsgType::SCheckpoint;
  m.sender = sender;
  m.episode = episode;
  m.b_last = b_last;
  return m;
}

}  // namespace

TEST_CASE("lower median picks the lower middle element") {
  CHECK(lower_median({100, 200, 5000}) == 200);  // robust to one inflated report
  CHECK(lower_median({5000, 100, 200}) == 200);  // order-insensitive
  CHECK(lower_median({800, 800, 800}) == 800);
  CHECK(lower_median({1, 2, 3, 4}) == 2);  // even count: lower of the two middles
  CHECK(lower_median({7}) == 7);
}

TEST_CASE("wire encoding round-trips every message shape") {
  Authenticator auth(Authenticator::Mode::Hmac, 99, 5);

  Message m;
  m.type = MsgType::Forward;
  m.sender = 2;
  m.view = 3;
  m.episode = 7;
  m.txn = sample_txn();
  auth.sign(m);
  Message d = Message::decode(m.encode());
  CHECK(d.type == m.type);
  CHECK(d.sender == m.sender);
  CHECK(d.view == m.view);
  CHECK(d.episode == m.episode);
  CHECK(d.txn.id == 42);
  CHECK(d.txn.read_set.size() == 2);
  CHECK(d.txn.read_set[1].key == 18);
  CHECK(d.txn.write_set[0].value == -12);
  CHECK(d.txn.simulated);
  CHECK(d.txn.validity == Validity::CommittedValid);
  CHECK(d.auth == m.auth);
  CHECK(auth.verify(d));

  Message b;
  b.type = MsgType::Batch;
  b.sender = 0;
  b.batch.seq = 12;
  b.batch.episode = 3;
  b.batch.txns = {sample_txn(), sample_txn()};
  b.batch.txns[1].id = 43;
  b.batch.purged = {sample_txn()};
  b.batch.purged[0].id = 99;
  auth.sign(b);
  Message db = Message::decode(b.encode());
  CHECK(db.batch.seq == 12);
  CHECK(db.batch.episode == 3);
  REQUIRE(db.batch.txns.size() == 2);
  CHECK(db.batch.txns[1].id == 43);
  REQUIRE(db.batch.purged.size() == 1);
  CHECK(db.batch.purged[0].id == 99);
  CHECK(auth.verify(db));

  Message c = checkpoint(1, 9, 5.25, 1234.5);
  auth.sign(c);
  Message dc = Message::decode(c.encode());
  CHECK(dc.features == c.features);
  CHECK(dc.e == 5.25);
  CHECK(dc.p == 1234.5);

  Message p;
  p.type = MsgType::Propose;
  p.sender = 0;
  p.episode = 9;
  p.e = 5.25;
  p.p = 1234.5;
  for (uint32_t s : {0u, 1u, 2u}) {
    Message cp = checkpoint(s, 9, 5.25, 1234.5);
    auth.sign(cp);
    p.certificate.push_back(cp);
  }
  auth.sign(p);
  Message dp = Message::decode(p.encode());
  REQUIRE(dp.certificate.size() == 3);
  CHECK(dp.certificate[2].sender == 2);
  CHECK(auth.verify(dp.certificate[2]));
  CHECK(auth.verify(dp));

  Message s;
  s.type = MsgType::SPropose;
  s.sender = 1;
  s.watermark = 42;
  auth.sign(s);
  Message ds = Message::decode(s.encode());
  CHECK(ds.watermark == 42);

  Message sc = s_checkpoint(2, 4, 40);
  auth.sign(sc);
  CHECK(Message::decode(sc.encode()).b_last == 40);
}

TEST_CASE("batch wire size grows with payload") {
  Message small;
  small.type = MsgType::Batch;
  small.batch.txns = {sample_txn()};
  Message big = small;
  for (int i = 0; i < 99; i++) big.batch.txns.push_back(sample_txn());
  CHECK(big.wire_size() > small.wire_size() + 90 * (small.wire_size() / 2));
}

TEST_CASE("authenticator accepts genuine messages and rejects tampering") {
  Authenticator auth(Authenticator::Mode::Hmac, 7, 4);
  Message m = checkpoint(1, 5, 2.0, 900.0);
  auth.sign(m);
  CHECK(auth.verify(m));

  Message tampered = m;
  tampered.p = 900000.0;  // inflate after signing
  CHECK_FALSE(auth.verify(tampered));

  Message forged = m;
  forged.sender = 2;  // claim another identity with peer 1's tag
  CHECK_FALSE(auth.verify(forged));

  // Different runs derive different keys.
  Authenticator other(Authenticator::Mode::Hmac, 8, 4);
  CHECK_FALSE(other.verify(m));

  Authenticator none(Authenticator::Mode::None, 7, 4);
  Message u = checkpoint(1, 5, 2.0, 900.0);
  none.sign(u);
  CHECK(none.verify(u));
}

namespace {

Message make_propose(const Authenticator& auth, std::vector<Message> cert,
                     double e, double p) {
  Message m;
  m.type = MsgType::Propose;
  m.sender = 0;
  m.episode = cert.empty() ? 0 : cert[0].episode;
  m.e = e;
  m.p = p;
  m.certificate = std::move(cert);
  auth.sign(m);
  return m;
}

}  // namespace

TEST_CASE("a proposal is valid only with a quorum certificate and median values") {
  const uint32_t f = 1;
  Authenticator auth(Authenticator::Mode::Hmac, 7, 4);
  auto cp = [&](uint32_t s, double e, double p) {
    Message m = checkpoint(s, 5, e, p);
    auth.sign(m);
    return m;
  };

  // Honest reports 100 and 200; one inflated 5000 report. The lower medians
  // of e and p (taken independently) stay inside the honest range.
  std::vector<Message> cert = {cp(0, 2.0, 100), cp(1, 3.0, 200), cp(2, 2e6, 5000)};
  CHECK(validate_propose(make_propose(auth, cert, 3.0, 200), f, auth));

  // Claiming the max instead of the median is rejected.
  CHECK_FALSE(validate_propose(make_propose(auth, cert, 3.0, 5000), f, auth));
  CHECK_FALSE(validate_propose(make_propose(auth, cert, 2e6, 200), f, auth));

  // Too few reports.
  CHECK_FALSE(validate_propose(
      make_propose(auth, {cp(0, 2.0, 100), cp(1, 3.0, 200)}, 2.0, 100), f, auth));

  // Duplicate senders cannot substitute for a quorum.
  CHECK_FALSE(validate_propose(
      make_propose(auth, {cp(0, 2.0, 100), cp(0, 3.0, 200), cp(2, 4.0, 300)},
                   3.0, 200),
      f, auth));

  // A tampered report invalidates the certificate.
  auto bad = cert;
  bad[1].p = 999999;
  CHECK_FALSE(validate_propose(make_propose(auth, bad, 2.0, 5000), f, auth));

  // Mixed episodes are rejected.
  auto mixed = cert;
  mixed[2] = checkpoint(2, 6, 2e6, 5000);
  auth.sign(mixed[2]);
  CHECK_FALSE(validate_propose(make_propose(auth, mixed, 2.0, 200), f, auth));
}

namespace {

Message make_s_propose(const Authenticator& auth, std::vector<Message> cert,
                       uint64_t watermark) {
  Message m;
  m.type = MsgType::SPropose;
  m.sender = 0;
  m.episode = cert.empty() ? 0 : cert[0].episode;
  m.watermark = watermark;
  m.certificate = std::move(cert);
  auth.sign(m);
  return m;
}

}  // namespace

TEST_CASE("slow-path proposal takes the max reported height, capped") {
  const uint32_t f = 1;
  Authenticator auth(Authenticator::Mode::Hmac, 7, 4);
  auto scp = [&](uint32_t s, uint64_t b_last) {
    Message m = s_checkpoint(s, 5, b_last);
    auth.sign(m);
    return m;
  };

  // Reports {40, 42, 41}: the agreed watermark is 42, so the slowest peers
  // catch up rather than roll back.
  std::vector<Message> cert = {scp(0, 40), scp(1, 42), scp(2, 41)};
  CHECK(validate_s_propose(make_s_propose(auth, cert, 42), f, auth, 100));
  CHECK_FALSE(validate_s_propose(make_s_propose(auth, cert, 41), f, auth, 100));
  CHECK_FALSE(validate_s_propose(make_s_propose(auth, cert, 43), f, auth, 100));

  // A fast-ahead lie of 45 is capped at the episode's planned end.
  std::vector<Message> lied = {scp(0, 40), scp(1, 45), scp(2, 41)};
  CHECK(validate_s_propose(make_s_propose(auth, lied, 42), f, auth, 42));
  CHECK_FALSE(validate_s_propose(make_s_propose(auth, lied, 45), f, auth, 42));

  // Quorum and distinct senders still required.
  CHECK_FALSE(validate_s_propose(make_s_propose(auth, {scp(0, 40), scp(1, 42)}, 42),
                                 f, auth, 100));
  CHECK_FALSE(validate_s_propose(
      make_s_propose(auth, {scp(0, 40), scp(0, 42), scp(2, 41)}, 42), f, auth, 100));
}

TEST_CASE("message type names are stable for logs") {
  CHECK(std::string(to_string(MsgType::Checkpoint)) == "CHECKPOINT");
  CHECK(std::string(to_string(MsgType::SCommit)) == "S-COMMIT");
}
