#include "dnssec/trace.hpp"

#include "dnssec/errors.hpp"

namespace dnssec {

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::ActivityStart: return "ActivityStart";
    case EventKind::ActivityEnd: return "ActivityEnd";
    case EventKind::ServerDomainName: return "ServerDomainName";
    case EventKind::SignEvent: return "SignEvent";
    case EventKind::ClientQuery: return "ClientQuery";
    case EventKind::ClientResponse: return "ClientResponse";
    case EventKind::ResolverQuery: return "ResolverQuery";
    case EventKind::ServerSend: return "ServerSend";
    case EventKind::ResolverReceive: return "ResolverReceive";
    case EventKind::CacheLookup: return "CacheLookup";
    case EventKind::CacheInsert: return "CacheInsert";
    case EventKind::CacheExpire: return "CacheExpire";
    case EventKind::LockAcquire: return "LockAcquire";
    case EventKind::LockRelease: return "LockRelease";
    case EventKind::AcceptEvent: return "AcceptEvent";
    case EventKind::AdversaryAction: return "AdversaryAction";
    case EventKind::KnowledgeGrow: return "KnowledgeGrow";
  }
  return "?";
}

std::string to_string(const Event& e) {
  std::string out = "#" + std::to_string(e.seq) + " " + to_string(e.kind);
  out += " act=" + std::to_string(e.activity);
  if (!e.server.empty()) out += " server=" + e.server;
  if (e.name) out += " name=" + e.name->to_string();
  if (e.type) out += std::string(" type=") + to_string(*e.type);
  if (e.qid) out += " qid=" + std::to_string(e.qid);
  if (e.origin_qid) out += " origin=" + std::to_string(e.origin_qid);
  if (e.cd) out += " cd=1";
  if (!e.partition.empty()) out += " part=" + e.partition;
  if (e.version) out += " v=" + std::to_string(e.version);
  if (!e.status.empty()) out += " status=" + e.status;
  if (!e.key_id.empty()) out += " key=" + e.key_id;
  if (!e.digest.empty()) out += " msg=" + e.digest;
  if (!e.records.empty()) {
    out += " rr=";
    for (std::size_t i = 0; i < e.records.size(); ++i) out += (i ? "," : "") + e.records[i];
  }
  if (!e.detail.empty()) out += " | " + e.detail;
  return out;
}

std::size_t Trace::emit(Event e) {
  if (events_.size() >= budget_) {
    throw BudgetExceeded("event budget of " + std::to_string(budget_) + " exhausted");
  }
  e.seq = events_.size();
  events_.push_back(std::move(e));
  return events_.back().seq;
}

std::string Trace::dump() const {
  std::string out;
  for (const auto& e : events_) out += to_string(e) + "\n";
  return out;
}

}  // namespace dnssec
