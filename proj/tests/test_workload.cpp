#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "chainlab/workload/smallbank.hpp"

using namespace chainlab;
using namespace chainlab::core;
using namespace chainlab::workload;

TEST_CASE("preset table") {
  auto a = preset('A');
  CHECK(a.p_write == 0.2);
  CHECK(a.p_hot == 0.95);
  CHECK(a.n_hot == 5);
  CHECK(a.n_trans == 300);
  CHECK(a.t_fire == 50 * kMillisecond);
  CHECK(a.t_compute == 5 * kMillisecond);

  auto b = preset('B');
  CHECK(b.p_write == 0.5);
  CHECK(b.p_hot == 0.99);
  CHECK(b.n_hot == 10);
  CHECK(b.n_trans == 100);
  CHECK(b.t_compute == 1 * kMillisecond);

  auto c = preset('C');
  CHECK(c.p_write == 0.5);
  CHECK(c.p_hot == 0.1);
  CHECK(c.n_hot == 10);
  CHECK(c.n_trans == 300);
  CHECK(c.t_compute == 10 * kMillisecond);

  auto d = preset('D');
  CHECK(d.p_write == 0.9);
  CHECK(d.p_hot == 0.95);
  CHECK(d.n_hot == 1);
  CHECK(d.n_trans == 100);
  CHECK(d.t_compute == 0);

  auto e = preset('E');
  CHECK(e.p_write == 0.5);
  CHECK(e.p_hot == 0.99);
  CHECK(e.n_hot == 10);
  CHECK(e.n_trans == 100);
  CHECK(e.t_compute == 5 * kMillisecond);

  CHECK_THROWS(preset('Z'));
  CHECK(is_preset_name("C"));
  CHECK_FALSE(is_preset_name("F"));
  CHECK_FALSE(is_preset_name("AB"));
}

TEST_CASE("empirical write and hot-key probabilities match the preset within 0.02") {
  constexpr int kDraws = 10000;
  constexpr double kTol = 0.02;
  for (char name : {'A', 'B', 'C', 'D', 'E'}) {
    auto p = preset(name);
    TxnGenerator gen(1000, 77 + name);
    int writes = 0, hot = 0;
    for (int i = 0; i < kDraws; i++) {
      auto t = gen.next(p);
      if (is_modifying(t.kind)) writes++;
      if (t.acct_a < p.n_hot) hot++;
    }
    double pw = static_cast<double>(writes) / kDraws;
    double ph = static_cast<double>(hot) / kDraws;
    INFO("preset ", name, " pw=", pw, " ph=", ph);
    CHECK(std::abs(pw - p.p_write) <= kTol);
    CHECK(std::abs(ph - p.p_hot) <= kTol);
  }
}

TEST_CASE("a single hot account dominates accesses when p_hot is high") {
  auto p = preset('D');  // n_hot = 1, p_hot = 0.95
  TxnGenerator gen(1000, 5);
  int on_zero = 0;
  for (int i = 0; i < 5000; i++)
    if (gen.next(p).acct_a == 0) on_zero++;
  CHECK(on_zero > 5000 * 0.92);
}

TEST_CASE("generator streams are a pure function of the seed") {
  auto p = preset('B');
  TxnGenerator g1(100, 42), g2(100, 42), g3(100, 43);
  bool diverged = false;
  for (int i = 0; i < 200; i++) {
    auto a = g1.next(p), b = g2.next(p), c = g3.next(p);
    CHECK(a.id == b.id);
    CHECK(a.kind == b.kind);
    CHECK(a.acct_a == b.acct_a);
    CHECK(a.acct_b == b.acct_b);
    CHECK(a.amount == b.amount);
    CHECK(a.compute_delay == p.t_compute);
    if (a.kind != c.kind || a.acct_a != c.acct_a || a.amount != c.amount)
      diverged = true;
  }
  CHECK(diverged);
  CHECK(g1.generated() == 200);
}

TEST_CASE("two-account transactions use distinct accounts") {
  auto p = preset('D');  // worst case: nearly every pick lands on account 0
  TxnGenerator gen(1000, 11);
  for (int i = 0; i < 2000; i++) {
    auto t = gen.next(p);
    if (t.kind == TxnKind::SendPayment || t.kind == TxnKind::Amalgamate)
      CHECK(t.acct_a != t.acct_b);
  }
}

TEST_CASE("schedule switches params exactly at segment boundaries") {
  WorkloadSchedule sched;
  sched.segments.push_back({preset('A'), 10 * kMillisecond});
  sched.segments.push_back({preset('B'), 10 * kMillisecond});
  CHECK(sched.total_duration() == 20 * kMillisecond);
  CHECK(sched.at(0).p_write == 0.2);
  CHECK(sched.at(9999).p_write == 0.2);
  CHECK(sched.at(10000).p_write == 0.5);
  CHECK(sched.at(19999).p_write == 0.5);
  // Past the end the last segment's params remain in force.
  CHECK(sched.at(99999).p_write == 0.5);
  WorkloadSchedule empty;
  CHECK_THROWS(empty.at(0));
}

TEST_CASE("transaction semantics: value movement is conserved") {
  auto read = [](std::map<Key, int64_t> m) {
    return [m](Key k) { return m.count(k) ? m.at(k) : 0; };
  };

  Transaction pay;
  pay.kind = TxnKind::SendPayment;
  pay.acct_a = 1;
  pay.acct_b = 2;
  pay.amount = 30;
  auto w = compute_writes(pay, read({{key_checking(1), 100}, {key_checking(2), 50}}));
  REQUIRE(w.size() == 2);
  CHECK(w[0].key == key_checking(1));
  CHECK(w[0].value == 70);
  CHECK(w[1].key == key_checking(2));
  CHECK(w[1].value == 80);

  Transaction amal;
  amal.kind = TxnKind::Amalgamate;
  amal.acct_a = 1;
  amal.acct_b = 2;
  w = compute_writes(amal, read({{key_savings(1), 40},
                                 {key_checking(1), 60},
                                 {key_checking(2), 5}}));
  REQUIRE(w.size() == 2);
  CHECK(w[0].key == key_savings(1));
  CHECK(w[0].value == 0);  // savings drained
  CHECK(w[1].key == key_checking(2));
  CHECK(w[1].value == 105);  // receives savings + checking of account 1

  Transaction bal;
  bal.kind = TxnKind::Balance;
  bal.acct_a = 1;
  CHECK(compute_writes(bal, read({})).empty());
}

TEST_CASE("declared footprints match the executed footprints") {
  Transaction t;
  t.kind = TxnKind::WriteCheck;
  t.acct_a = 3;
  auto reads = declared_reads(t);
  auto writes = declared_writes(t);
  REQUIRE(reads.size() == 2);
  CHECK(reads[0] == key_savings(3));
  CHECK(reads[1] == key_checking(3));
  REQUIRE(writes.size() == 1);
  CHECK(writes[0] == key_checking(3));

  // Every write key computed by the semantics is declared.
  for (auto kind : {TxnKind::TransactSavings, TxnKind::DepositChecking,
                    TxnKind::SendPayment, TxnKind::WriteCheck,
                    TxnKind::Amalgamate, TxnKind::Balance}) {
    Transaction x;
    x.kind = kind;
    x.acct_a = 1;
    x.acct_b = 2;
    x.amount = 10;
    auto declared = declared_writes(x);
    auto computed = compute_writes(x, [](Key) { return 100; });
    REQUIRE(computed.size() == declared.size());
    for (size_t i = 0; i < computed.size(); i++)
      CHECK(computed[i].key == declared[i]);
  }
}
