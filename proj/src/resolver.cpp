#include "dnssec/resolver.hpp"

#include "dnssec/errors.hpp"

namespace dnssec {

bool is_referral(const Response& r, const DomainName& apex, const Query& q, DomainName* cut) {
  if (r.rcode != Rcode::NoError || !r.answer.empty()) return false;
  for (const auto& rr : r.authority) {
    if (rr.type() != RecordType::NS || !rr.owner.is_strict_subdomain_of(apex)) continue;
    if (!q.qname.is_subdomain_of(rr.owner)) continue;
    if (q.qname == rr.owner && q.qtype == RecordType::DS) continue;
    if (cut) *cut = rr.owner;
    return true;
  }
  return false;
}

Resolver::Resolver(Scheduler& sched, Trace& trace, Network& net, LockTable& locks, Cache& cache,
                   TrustAnchor anchor, ResolverConfig cfg, std::string root_server)
    : sched_(sched),
      trace_(trace),
      net_(net),
      locks_(locks),
      cache_(cache),
      anchor_(std::move(anchor)),
      cfg_(std::move(cfg)),
      root_server_(std::move(root_server)) {}

Partition Resolver::partition_for(bool cd) const {
  if (cfg_.cache_partitioning == CachePartitioning::Unified) return Partition::Unified;
  return cd ? Partition::Unvalidated : Partition::Validated;
}

void Resolver::emit_accepts(const std::string& server, const Query& q,
                            const std::vector<AcceptedRRset>& accepted) {
  for (const auto& a : accepted) {
    Event e;
    e.kind = EventKind::AcceptEvent;
    e.activity = sched_.current();
    e.server = server;
    e.name = a.rrset.owner;
    e.type = a.rrset.type;
    e.key_id = key_fingerprint(a.key.key);
    e.digest = a.message_digest;
    for (const auto& rr : a.rrset.records) e.records.push_back(fingerprint(rr));
    e.status = to_string(a.state);
    e.detail = "zone=" + a.zone.to_string();
    accepted_.push_back({trace_.emit(std::move(e)), server, q, a});
  }
}

Task<Resolver::Step> Resolver::fetch(std::string server, Query q, std::uint64_t origin_qid,
                                     Validator validate) {
  const CacheKey key{server, q.qname, q.qtype, partition_for(q.cd)};
  auto check = [&](const Response& r) {
    if (q.cd) return Validation{SecurityState::Insecure, "checking disabled", {}, std::nullopt};
    return validate(r);
  };

  if (cfg_.cache_enabled) {
    auto acquiring = locks_.acquire(key);
    co_await std::move(acquiring);
    auto present = cache_.snapshot().find(key);
    if (present != cache_.snapshot().end() && present->second.status == EntryStatus::Active &&
        sched_.choose(cfg_.expiry_probability)) {
      cache_.expire(key);
    }
    if (auto hit = cache_.lookup(key)) {
      hits_.push_back({trace_.size() - 1, key, *hit, q.cd});
      Step step{hit->response, hit->security, "", true};
      if (!hit->validated && !q.cd) {
        // Entries cached with CD=1 are revalidated in place; a failure is
        // final and no fresh copy is fetched.
        Validation v = validate(hit->response);
        step.state = v.state;
        step.reason = v.state == SecurityState::Bogus ? "revalidation failed: " + v.reason : v.reason;
        if (v.state != SecurityState::Bogus) emit_accepts(server, q, v.accepted);
      } else if (q.cd) {
        step.state = SecurityState::Insecure;
      }
      locks_.release(key);
      co_return step;
    }
  }

  Query wire = q;
  wire.qid = net_.next_qid();
  auto exchanging = net_.exchange(server, wire, origin_qid);
  Response r = co_await std::move(exchanging);
  Validation v = check(r);
  if (!q.cd && v.state != SecurityState::Bogus) emit_accepts(server, wire, v.accepted);
  if (cfg_.cache_enabled) {
    if (v.state != SecurityState::Bogus) {
      cache_.insert(key, CacheEntry{normalized(r), server, EntryStatus::Active, !q.cd, v.state, 0,
                                    v.denial});
    }
    locks_.release(key);
  }
  co_return Step{std::move(r), v.state, v.reason, false};
}

Task<ZoneKeys> Resolver::zone_keys(std::string server, DomainName apex,
                                   std::vector<ResourceRecord> ds, bool cd,
                                   std::uint64_t origin_qid) {
  if (cd) co_return ZoneKeys{apex, {}, SecurityState::Insecure, "checking disabled"};
  auto link = [&](const Response& r) {
    RRSet dnskeys;
    for (const auto& set : group_rrsets(r.answer)) {
      if (set.owner == apex && set.type == RecordType::DNSKEY) dnskeys = set;
    }
    return std::make_pair(verify_link(apex, ds, dnskeys, cfg_), dnskeys);
  };
  Validator validate = [&](const Response& r) {
    auto [keys, dnskeys] = link(r);
    Validation v{keys.state, keys.reason, {}, std::nullopt};
    if (keys.state == SecurityState::Secure) {
      const RRsetVerdict by_zsk = validate_rrset(dnskeys, keys, cfg_);
      if (by_zsk.key) v.accepted.push_back({apex, dnskeys, *by_zsk.key, by_zsk.message_digest, keys.state});
    }
    return v;
  };
  auto fetching = fetch(server, Query{apex, RecordType::DNSKEY, false, true, 0}, origin_qid, validate);
  Step step = co_await std::move(fetching);
  if (step.state == SecurityState::Bogus) {
    co_return ZoneKeys{apex, {}, SecurityState::Bogus, step.reason};
  }
  co_return link(step.response).first;
}

Resolver::Validation Resolver::validate_step(const Query& q, const Response& r, const ZoneKeys& keys) {
  DomainName cut;
  if (is_referral(r, keys.apex, q, &cut)) {
    std::vector<ResourceRecord> ds_section;
    for (const auto& rr : r.authority) {
      if (rr.owner == cut && rr.covered_type() == RecordType::DS) ds_section.push_back(rr);
    }
    if (keys.state != SecurityState::Secure) return Validation{keys.state, keys.reason, {}, std::nullopt};
    if (ds_section.empty()) {
      DenialResult d = validate_denial(Query{cut, RecordType::DS, false, true, 0}, r.authority, keys, cfg_);
      if (d.kind == DenialKind::ProvenNoData) {
        return Validation{SecurityState::Insecure, "insecure delegation", {}, std::nullopt};
      }
      return Validation{SecurityState::Bogus, "delegation without DS proof", {}, std::nullopt};
    }
    const RRSet ds = group_rrsets(ds_section).front();
    const RRsetVerdict v = validate_rrset(ds, keys, cfg_);
    Validation out{v.state, v.reason, {}, std::nullopt};
    if (v.state == SecurityState::Secure && v.key) {
      out.accepted.push_back({keys.apex, ds, *v.key, v.message_digest, v.state});
    }
    return out;
  }

  AnswerVerdict a = validate_answer(q, r, keys, cfg_);
  Validation out{a.state, a.reason, a.accepted, std::nullopt};
  if (a.denial && !a.denial->families.empty() && a.state != SecurityState::Bogus) {
    const DenialFamily family = *a.denial->families.begin();
    out.denial = family;
    if (cfg_.mixed_denial_policy == MixedDenialPolicy::Servfail) {
      auto [it, fresh] = families_.emplace(keys.apex, family);
      if (!fresh && (it->second != family || a.denial->families.size() > 1)) {
        return Validation{SecurityState::Bogus, "mixed denial families", {}, std::nullopt};
      }
    }
  }
  return out;
}

Task<ValidatedResponse> Resolver::resolve(Query q) {
  ValidatedResponse out;
  const std::uint64_t origin = q.qid;
  auto fail = [&](std::string reason) {
    out.response = Response{Rcode::ServFail, {}, {}, {}, false};
    out.security_state = SecurityState::Bogus;
    out.ede = std::move(reason);
    out.proof.push_back("bogus: " + out.ede);
    return out;
  };

  DomainName apex = DomainName::root();
  std::string server = root_server_;
  auto anchor_keys = zone_keys(server, apex, anchor_.ds, q.cd, origin);
  ZoneKeys keys = co_await std::move(anchor_keys);
  if (keys.state == SecurityState::Bogus) co_return fail(keys.reason);
  out.proof.push_back("keys " + apex.to_string() + " " + to_string(keys.state));

  for (int depth = 0; depth <= cfg_.depth_bound; ++depth) {
    const ZoneKeys current = keys;
    auto fetching = fetch(server, q, origin, [this, &q, current](const Response& r) {
      return validate_step(q, r, current);
    });
    Step step = co_await std::move(fetching);
    if (step.state == SecurityState::Bogus) co_return fail(step.reason);

    DomainName cut;
    if (!is_referral(step.response, apex, q, &cut)) {
      out.response = step.response;
      out.response.additional.clear();
      out.security_state = q.cd ? SecurityState::Insecure : std::min(step.state, keys.state);
      out.response.ad = out.security_state == SecurityState::Secure;
      out.proof.push_back(std::string(step.from_cache ? "cached " : "answer ") +
                          to_string(out.security_state));
      co_return out;
    }

    const NameServer* child = net_.server_for(cut);
    if (!child) throw ResolutionError("no server for delegated zone " + cut.to_string());
    if (step.state == SecurityState::Secure) {
      std::vector<ResourceRecord> ds;
      for (const auto& rr : step.response.authority) {
        if (rr.owner == cut && rr.type() == RecordType::DS) ds.push_back(rr);
      }
      auto child_keys = zone_keys(child->id, cut, ds, q.cd, origin);
      keys = co_await std::move(child_keys);
      if (keys.state == SecurityState::Bogus) co_return fail(keys.reason);
    } else {
      keys = ZoneKeys{cut, {}, step.state, step.reason};
    }
    out.proof.push_back("referral " + cut.to_string() + " " + to_string(keys.state));
    apex = cut;
    server = child->id;
  }
  throw ResolutionError("delegation depth bound of " + std::to_string(cfg_.depth_bound) +
                        " exceeded for " + q.qname.to_string());
}

}  // namespace dnssec
