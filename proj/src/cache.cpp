#include "dnssec/cache.hpp"

#include "dnssec/errors.hpp"

namespace dnssec {

const char* to_string(Partition p) {
  switch (p) {
    case Partition::Unified: return "unified";
    case Partition::Validated: return "validated";
    case Partition::Unvalidated: return "unvalidated";
  }
  return "?";
}

const char* to_string(SecurityState s) {
  switch (s) {
    case SecurityState::Bogus: return "Bogus";
    case SecurityState::Insecure: return "Insecure";
    case SecurityState::Secure: return "Secure";
  }
  return "?";
}

std::string to_string(const CacheKey& k) {
  return k.server + "/" + k.owner.to_string() + "/" + to_string(k.type) + "/" + to_string(k.partition);
}

namespace {

Event key_event(EventKind kind, const CacheKey& key, ActivityId who) {
  Event e;
  e.kind = kind;
  e.activity = who;
  e.server = key.server;
  e.name = key.owner;
  e.type = key.type;
  e.partition = to_string(key.partition);
  return e;
}

}  // namespace

// ---------------------------------------------------------------- locks

void LockTable::emit(EventKind kind, const CacheKey& key) {
  trace_.emit(key_event(kind, key, sched_.current()));
}

Task<void> LockTable::acquire(CacheKey key) {
  co_await sched_.yield();
  State& st = locks_[key];
  if (st.holder == sched_.current()) {
    throw ContractViolation("re-entrant acquire of " + to_string(key));
  }
  if (st.holder) {
    auto parking = sched_.park([&st](std::coroutine_handle<> h, ActivityId who) {
      st.waiters.emplace_back(h, who);
    });
    co_await parking;
    // Ownership was handed over by release().
  } else {
    st.holder = sched_.current();
  }
  emit(EventKind::LockAcquire, key);
}

void LockTable::release(const CacheKey& key) {
  auto it = locks_.find(key);
  if (it == locks_.end() || it->second.holder != sched_.current()) {
    throw ContractViolation("release of " + to_string(key) + " by a non-holder");
  }
  emit(EventKind::LockRelease, key);
  State& st = it->second;
  if (st.waiters.empty()) {
    st.holder.reset();
    return;
  }
  auto [handle, who] = st.waiters.front();
  st.waiters.pop_front();
  st.holder = who;
  sched_.make_ready(handle, who);
}

bool LockTable::held_by(const CacheKey& key, ActivityId who) const {
  auto it = locks_.find(key);
  return it != locks_.end() && it->second.holder == who;
}

std::size_t LockTable::outstanding() const {
  std::size_t n = 0;
  for (const auto& [key, st] : locks_) n += st.holder.has_value();
  return n;
}

// ---------------------------------------------------------------- cache

void Cache::require_lock(const CacheKey& key, const char* op) const {
  if (!locks_.held_by(key, sched_.current())) {
    throw ContractViolation(std::string(op) + " of " + to_string(key) + " without its lock");
  }
}

Event Cache::event(EventKind kind, const CacheKey& key) const {
  return key_event(kind, key, sched_.current());
}

std::optional<CacheEntry> Cache::lookup(const CacheKey& key) {
  require_lock(key, "lookup");
  Event e = event(EventKind::CacheLookup, key);
  auto it = entries_.find(key);
  std::optional<CacheEntry> out;
  if (it == entries_.end()) {
    e.status = "miss";
  } else if (it->second.status == EntryStatus::Expired) {
    e.status = "miss-expired";
    e.version = it->second.version;
  } else {
    e.status = "hit";
    e.version = it->second.version;
    out = it->second;
  }
  trace_.emit(std::move(e));
  return out;
}

std::uint64_t Cache::insert(const CacheKey& key, CacheEntry entry) {
  require_lock(key, "insert");
  entry.version = ++versions_[key];
  entry.status = EntryStatus::Active;
  Event e = event(EventKind::CacheInsert, key);
  e.version = entry.version;
  e.status = entry.validated ? "validated" : "unvalidated";
  e.detail = "origin=" + entry.origin + " security=" + to_string(entry.security);
  entries_[key] = std::move(entry);
  trace_.emit(std::move(e));
  return entries_[key].version;
}

void Cache::expire(const CacheKey& key) {
  require_lock(key, "expire");
  auto it = entries_.find(key);
  if (it == entries_.end()) return;
  CacheEntry replaced = std::move(it->second);
  entries_.erase(it);
  replaced.status = EntryStatus::Expired;
  Event e = event(EventKind::CacheExpire, key);
  e.version = replaced.version;
  entries_.emplace(key, std::move(replaced));
  trace_.emit(std::move(e));
}

}  // namespace dnssec
