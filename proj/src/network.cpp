#include "dnssec/network.hpp"

#include "dnssec/errors.hpp"

namespace dnssec {

Response normalized(Response r) {
  r.additional.clear();
  r.ad = false;
  return r;
}

const NameServer& Network::add_server(NameServer server) {
  if (by_id_.contains(server.id)) throw ScenarioError("duplicate server " + server.id);
  if (by_apex_.contains(server.zone.apex())) {
    throw ScenarioError("two servers for zone " + server.zone.apex().to_string());
  }
  servers_.push_back(std::make_unique<NameServer>(std::move(server)));
  NameServer* s = servers_.back().get();
  by_id_[s->id] = s;
  by_apex_[s->zone.apex()] = s;
  return *s;
}

const NameServer& Network::server(const std::string& id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) throw ResolutionError("unknown server " + id);
  return *it->second;
}

const NameServer* Network::server_for(const DomainName& apex) const {
  auto it = by_apex_.find(apex);
  return it == by_apex_.end() ? nullptr : it->second;
}

namespace {

std::vector<std::string> fingerprints(const Response& r) {
  std::vector<std::string> out;
  for (const auto* section : {&r.answer, &r.authority, &r.additional}) {
    for (const auto& rr : *section) out.push_back(fingerprint(rr));
  }
  return out;
}

}  // namespace

Task<Response> Network::exchange(std::string server_id, Query q, std::uint64_t origin_qid) {
  const NameServer& ns = server(server_id);
  const Channel ch{kResolverRole, server_id, mode_};
  ++messages_;

  Event query_event;
  query_event.kind = EventKind::ResolverQuery;
  query_event.activity = sched_.current();
  query_event.server = server_id;
  query_event.name = q.qname;
  query_event.type = q.qtype;
  query_event.qid = q.qid;
  query_event.origin_qid = origin_qid;
  query_event.cd = q.cd;
  trace_.emit(query_event);
  co_await sched_.yield();

  if (adversary_) adversary_->intercept_query(ch, q);
  Response r = answer_query(ns.zone, q, ns.mode);

  Event send = query_event;
  send.kind = EventKind::ServerSend;
  send.status = to_string(r.rcode);
  send.records = fingerprints(r);
  trace_.emit(std::move(send));
  co_await sched_.yield();

  if (adversary_) r = adversary_->intercept(ch, q, r);

  Event receive = query_event;
  receive.kind = EventKind::ResolverReceive;
  receive.status = to_string(r.rcode);
  receive.records = fingerprints(r);
  trace_.emit(std::move(receive));
  co_return r;
}

}  // namespace dnssec
