#include <doctest.h>

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dnssec/cache.hpp"
#include "dnssec/errors.hpp"
#include "oracles.hpp"

using namespace dnssec;
using namespace oracles;

namespace {

Task<void> take_and_hold(Scheduler& sched, LockTable& locks, std::vector<ActivityId>& order, int holds) {
  auto acquiring = locks.acquire(key_for(0));
  co_await acquiring;
  order.push_back(sched.current());
  for (int i = 0; i < holds; ++i) {
    auto y = sched.yield();
    co_await y;
  }
  locks.release(key_for(0));
}

Task<void> insert_unlocked(Cache& cache) {
  cache.insert(key_for(0), CacheEntry{});
  co_return;
}

}  // namespace

TEST_CASE("scheduler runs are reproducible per seed and vary across seeds") {
  auto order_for = [](std::uint64_t seed) {
    Scheduler sched(seed);
    Trace trace;
    LockTable locks(sched, trace);
    std::vector<ActivityId> order;
    for (int i = 0; i < 4; ++i) {
      sched.spawn("w" + std::to_string(i), 0, [&] { return take_and_hold(sched, locks, order, 1); });
    }
    sched.run(10000);
    CHECK(locks.outstanding() == 0);
    return order;
  };
  CHECK(order_for(5) == order_for(5));
  std::set<std::vector<ActivityId>> distinct;
  for (std::uint64_t s = 1; s <= 50; ++s) distinct.insert(order_for(s));
  CHECK(distinct.size() > 5);
}

TEST_CASE("locks are exclusive and hand over without lapses") {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    Scheduler sched(seed);
    Trace trace;
    LockTable locks(sched, trace);
    std::vector<ActivityId> order;
    for (int i = 0; i < 3; ++i) {
      sched.spawn("w" + std::to_string(i), 0, [&] { return take_and_hold(sched, locks, order, 3); });
    }
    sched.run(10000);
    // Acquisitions alternate strictly with releases, and the trace order of
    // acquisitions is the order in which holders ran.
    std::vector<ActivityId> acquired;
    std::size_t held = 0;
    for (const auto& e : trace.events()) {
      if (e.kind == EventKind::LockAcquire) {
        CHECK(held == 0);
        ++held;
        acquired.push_back(e.activity);
      } else if (e.kind == EventKind::LockRelease) {
        --held;
      }
    }
    CHECK(acquired == order);
    CHECK(order.size() == 3);
  }
}

TEST_CASE("phases run in order and budgets are enforced") {
  Scheduler sched(1);
  Trace trace;
  LockTable locks(sched, trace);
  std::vector<ActivityId> order;
  sched.spawn("late", 1, [&] { return take_and_hold(sched, locks, order, 0); });
  sched.spawn("early", 0, [&] { return take_and_hold(sched, locks, order, 0); });
  sched.run(1000);
  CHECK(order == std::vector<ActivityId>{1, 0});

  Scheduler tight(1);
  Trace t2;
  LockTable l2(tight, t2);
  std::vector<ActivityId> o2;
  tight.spawn("w", 0, [&] { return take_and_hold(tight, l2, o2, 100); });
  CHECK_THROWS_AS(tight.run(10), BudgetExceeded);
}

TEST_CASE("cache operations without the lock are contract violations") {
  Scheduler sched(1);
  Trace trace;
  LockTable locks(sched, trace);
  Cache cache(locks, sched, trace);
  sched.spawn("w", 0, [&] { return insert_unlocked(cache); });
  CHECK_THROWS_AS(sched.run(100), ContractViolation);
  CHECK(cache.snapshot().empty());
}

TEST_CASE("cache versions grow per key and expiry hides entries") {
  Scheduler sched(1);
  Trace trace;
  LockTable locks(sched, trace);
  Cache cache(locks, sched, trace);
  std::vector<Op> ops(4);
  ops[0].kind = OpKind::Write;
  ops[0].value = "x";
  ops[1].kind = OpKind::Write;
  ops[1].value = "y";
  ops[2].kind = OpKind::Expire;
  ops[3].kind = OpKind::Read;
  int clock = 0;
  sched.spawn("w", 0, [&] { return run_ops(sched, locks, cache, ops, clock); });
  sched.run(1000);
  CHECK_FALSE(ops[3].observed.has_value());
  const auto& entry = cache.snapshot().at(key_for(0));
  CHECK(entry.version == 2);
  CHECK(entry.status == EntryStatus::Expired);
  std::vector<std::string> statuses;
  for (const auto& e : trace.events()) {
    if (e.kind == EventKind::CacheLookup) statuses.push_back(e.status);
  }
  CHECK(statuses == std::vector<std::string>{"miss-expired"});
}

TEST_CASE("cache is linearizable over random two-writer interleavings") {
  const LinearizabilitySweep sweep = linearizability_sweep(1, 10000);
  CHECK(sweep.trials == 10000);
  CHECK(sweep.violations == 0);
  CHECK(sweep.distinct_lock_orders > 100);  // the interleavings are genuinely varied
}

TEST_CASE("the linearizability oracle rejects a lost update") {
  // Two overlapping-free writes followed by a read that sees the older one.
  std::vector<Op> a(2), b(1);
  a[0] = Op{OpKind::Write, 0, "old", 0, 0, 1, std::nullopt};
  a[1] = Op{OpKind::Read, 0, "", 0, 4, 5, std::string("old")};
  b[0] = Op{OpKind::Write, 0, "new", 0, 2, 3, std::nullopt};
  CHECK_FALSE(linearizable(a, b, 0, 0, {}, Register{{0, std::string("new")}}));
  a[1].observed = "new";
  CHECK(linearizable(a, b, 0, 0, {}, Register{{0, std::string("new")}}));
}
