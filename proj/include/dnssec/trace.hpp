#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dnssec/name.hpp"
#include "dnssec/record.hpp"
#include "dnssec/scheduler.hpp"

namespace dnssec {

enum class EventKind : std::uint8_t {
  ActivityStart,
  ActivityEnd,
  ServerDomainName,  // a server hosts a name (emitted once per owner at start)
  SignEvent,
  ClientQuery,
  ClientResponse,
  ResolverQuery,  // the resolver names a query on the wire
  ServerSend,
  ResolverReceive,
  CacheLookup,
  CacheInsert,
  CacheExpire,
  LockAcquire,
  LockRelease,
  AcceptEvent,
  AdversaryAction,
  KnowledgeGrow,
};

const char* to_string(EventKind k);

/// One entry of the global event order. Fields not relevant to a kind stay
/// empty; the text dump prints only populated fields, in declaration order.
struct Event {
  std::size_t seq = 0;
  EventKind kind = EventKind::ActivityStart;
  ActivityId activity = kHarness;
  std::string server;
  std::optional<DomainName> name;
  std::optional<RecordType> type;
  std::uint64_t qid = 0;
  std::uint64_t origin_qid = 0;
  bool cd = false;
  std::string partition;
  std::uint64_t version = 0;
  std::string status;
  std::string key_id;
  std::string digest;
  std::vector<std::string> records;
  std::string detail;
};

std::string to_string(const Event& e);

class Trace {
 public:
  explicit Trace(std::size_t budget = SIZE_MAX) : budget_(budget) {}

  /// Appends `e`, assigning its sequence number. Throws BudgetExceeded once
  /// the event budget is used up.
  std::size_t emit(Event e);

  const std::vector<Event>& events() const { return events_; }
  std::size_t size() const { return events_.size(); }
  std::string dump() const;

 private:
  std::size_t budget_;
  std::vector<Event> events_;
};

}  // namespace dnssec
