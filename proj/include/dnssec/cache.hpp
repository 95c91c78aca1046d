#pragma once

#include <compare>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>

#include "dnssec/record.hpp"
#include "dnssec/scheduler.hpp"
#include "dnssec/trace.hpp"
#include "dnssec/zone.hpp"

namespace dnssec {

enum class Partition : std::uint8_t { Unified, Validated, Unvalidated };
const char* to_string(Partition p);

enum class EntryStatus : std::uint8_t { Active, Expired };

/// Ordered so that the weakest state compares lowest.
enum class SecurityState : std::uint8_t { Bogus, Insecure, Secure };
const char* to_string(SecurityState s);

struct CacheKey {
  std::string server;  // cache scope: the server the data came from
  DomainName owner;
  RecordType type = RecordType::A;
  Partition partition = Partition::Unified;
  friend auto operator<=>(const CacheKey&, const CacheKey&) = default;
};

std::string to_string(const CacheKey& k);

struct CacheEntry {
  Response response;  // the whole response minus its additional section
  std::string origin;
  EntryStatus status = EntryStatus::Active;
  bool validated = false;
  SecurityState security = SecurityState::Insecure;
  std::uint64_t version = 0;
  std::optional<DenialFamily> denial;  // family of a cached denial proof
};

/// Per-RRset locks with FIFO hand-off. Acquire and release are scheduler
/// decision points and appear in the trace.
class LockTable {
 public:
  LockTable(Scheduler& sched, Trace& trace) : sched_(sched), trace_(trace) {}

  Task<void> acquire(CacheKey key);
  /// Throws ContractViolation unless the current activity holds `key`.
  void release(const CacheKey& key);

  bool held_by(const CacheKey& key, ActivityId who) const;
  std::size_t outstanding() const;

 private:
  struct State {
    std::optional<ActivityId> holder;
    std::deque<std::pair<std::coroutine_handle<>, ActivityId>> waiters;
  };

  void emit(EventKind kind, const CacheKey& key);

  Scheduler& sched_;
  Trace& trace_;
  std::map<CacheKey, State> locks_;
};

/// Resolver cache. Every operation requires the caller to hold the key's
/// lock; violations raise ContractViolation.
class Cache {
 public:
  Cache(LockTable& locks, Scheduler& sched, Trace& trace)
      : locks_(locks), sched_(sched), trace_(trace) {}

  /// Never returns an Expired entry.
  std::optional<CacheEntry> lookup(const CacheKey& key);
  /// Stores `entry` as the newest version of `key` and returns that version.
  std::uint64_t insert(const CacheKey& key, CacheEntry entry);
  /// Marks the entry Expired in one step (remove-then-insert).
  void expire(const CacheKey& key);

  /// Unlocked view for post-run inspection only.
  const std::map<CacheKey, CacheEntry>& snapshot() const { return entries_; }

 private:
  void require_lock(const CacheKey& key, const char* op) const;
  Event event(EventKind kind, const CacheKey& key) const;

  LockTable& locks_;
  Scheduler& sched_;
  Trace& trace_;
  std::map<CacheKey, CacheEntry> entries_;
  std::map<CacheKey, std::uint64_t> versions_;
};

}  // namespace dnssec
