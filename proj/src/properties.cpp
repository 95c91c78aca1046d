#include "dnssec/properties.hpp"

#include <algorithm>
#include <charconv>
#include <json.hpp>
#include <sstream>

#include "dnssec/errors.hpp"

namespace dnssec {

const char* to_string(PropertyOutcome o) { return o == PropertyOutcome::Holds ? "Holds" : "Falsified"; }

const std::vector<PropertyInfo>& property_catalog() {
  using Q = Quantifier;
  static const std::vector<PropertyInfo> catalog{
      {1, "Cache - Core Func.", "Consistent Cache Hit Semantics", true, Q::Universal},
      {2, "Cache - Core Func.", "Provable Cache Miss Handling", true, Q::Universal},
      {3, "Cache - Core Func.", "Strict Server Cache Partitioning", true, Q::Universal},
      {4, "Cache - Core Func.", "Atomic Expiration & Refresh", true, Q::Universal},
      {5, "Cache - Consistency", "Mutual Exclusion via Locks", true, Q::Universal},
      {6, "Cache - Consistency", "State Synchronization", true, Q::Universal},
      {7, "Cache - Liveness", "Termination Under Expiry", true, Q::Universal},
      {8, "Cache - Liveness", "Resource Reclamation", true, Q::Universal},
      {9, "Data Auth. & Integrity", "Data Origin Authentication", true, Q::Universal},
      {10, "Data Auth. & Integrity", "Record Validation", true, Q::Universal},
      {11, "Data Auth. & Integrity", "Integrity Preservation", true, Q::Universal},
      {12, "Chain of Trust", "Chain Integrity", true, Q::Universal},
      {13, "Denial Auth. (NSEC)", "Executability", false, Q::Existential},
      {14, "Denial Auth. (NSEC)", "Domain Secrecy", false, Q::Universal},
      {15, "Denial Auth. (NSEC)", "Result Authentication", false, Q::Universal},
      {16, "Denial Auth. (NSEC3)", "Executability", false, Q::Existential},
      {17, "Denial Auth. (NSEC3)", "Domain Secrecy", false, Q::Universal},
      {18, "Denial Auth. (NSEC3)", "Result Authentication", false, Q::Universal},
      {19, "Mixed NSEC/NSEC3", "Denial Correctness", false, Q::Universal},
  };
  return catalog;
}

const PropertyInfo& property_info(int id) {
  for (const auto& p : property_catalog()) {
    if (p.id == id) return p;
  }
  throw ContractViolation("unknown property id " + std::to_string(id));
}

// ---------------------------------------------------------------- helpers

namespace {

std::optional<Violation> violation(std::size_t event, std::string message) {
  return Violation{event, std::move(message)};
}

/// Identity of a cache key as carried by lock and cache events.
std::string key_of(const Event& e) {
  return e.server + "|" + (e.name ? e.name->to_string() : "") + "|" + (e.type ? to_string(*e.type) : "") +
         "|" + e.partition;
}

const NameServer& server_by_id(const Topology& t, const std::string& id) {
  for (const auto& s : t.servers) {
    if (s.id == id) return s;
  }
  throw ContractViolation("no server " + id + " in the topology");
}

const NameServer& server_by_apex(const Topology& t, const DomainName& apex) {
  if (const NameServer* s = t.server_for(apex)) return *s;
  throw ContractViolation("no server for zone " + apex.to_string());
}

bool is_secure(const AcceptRecord& a) { return a.accepted.state == SecurityState::Secure; }

std::string describe(const AcceptRecord& a) {
  return a.accepted.rrset.owner.to_string() + "/" + to_string(a.accepted.rrset.type) + " from " + a.server;
}

/// Keys of a zone as a resolver holding the true DS would trust them.
ZoneKeys honest_keys(const SignedZone& z, const ResolverConfig& cfg) {
  const RRSet* dnskeys = z.zone().find(z.apex(), RecordType::DNSKEY);
  if (!dnskeys) return ZoneKeys{z.apex(), {}, SecurityState::Bogus, "no DNSKEY"};
  return verify_link(z.apex(), ds_for(z), *dnskeys, cfg);
}

/// A verifying RRSIG of an accepted RRset under its accepted key.
const ResourceRecord* verifying_rrsig(const AcceptedRRset& a, const ResolverConfig& cfg) {
  for (const auto& sig : a.rrset.rrsigs) {
    if (validate_rrsig(a.rrset, sig, a.key, cfg) == RrsigResult::Ok) return &sig;
  }
  return nullptr;
}

// ---------------------------------------------------------------- P1-P8

std::optional<Violation> cache_hit_consistency(const RunResult& run, CheckContext& ctx) {
  for (const auto& hit : run.hits) {
    if (!hit.entry.validated || hit.cd) continue;
    const NameServer& srv = server_by_id(*ctx.topology, hit.key.server);
    const Response truth = normalized(answer_query(srv.zone, Query{hit.key.owner, hit.key.type}, srv.mode));
    if (hit.entry.response != truth) {
      return violation(hit.seq, "validated hit for " + to_string(hit.key) +
                                    " differs from the authoritative answer of " + srv.id);
    }
  }
  return std::nullopt;
}

std::optional<Violation> cache_miss_atomicity(const RunResult& run, CheckContext&) {
  // (activity, key) -> acquisition seq of the current hold
  std::map<std::pair<ActivityId, std::string>, std::size_t> holds;
  std::map<ActivityId, std::size_t> last_receive;
  std::map<std::string, std::pair<std::size_t, ActivityId>> last_insert;
  for (const Event& e : run.trace.events()) {
    switch (e.kind) {
      case EventKind::LockAcquire: holds[{e.activity, key_of(e)}] = e.seq; break;
      case EventKind::LockRelease: holds.erase({e.activity, key_of(e)}); break;
      case EventKind::ResolverReceive: last_receive[e.activity] = e.seq; break;
      case EventKind::CacheInsert: {
        const std::string key = key_of(e);
        auto hold = holds.find({e.activity, key});
        if (hold == holds.end()) return violation(e.seq, "insert into " + key + " outside its lock scope");
        auto recv = last_receive.find(e.activity);
        if (recv == last_receive.end() || recv->second < hold->second) {
          return violation(e.seq, "insert into " + key + " without a fetch inside the same lock scope");
        }
        auto prior = last_insert.find(key);
        if (prior != last_insert.end() && prior->second.first > hold->second &&
            prior->second.second != e.activity) {
          return violation(e.seq, "interleaved insert into " + key + " by another activity");
        }
        last_insert[key] = {e.seq, e.activity};
        break;
      }
      default: break;
    }
  }
  return std::nullopt;
}

std::optional<Violation> server_partitioning(const RunResult& run, CheckContext& ctx) {
  for (const Event& e : run.trace.events()) {
    if (e.kind != EventKind::CacheInsert) continue;
    if (e.detail.rfind("origin=" + e.server + " ", 0) != 0) {
      return violation(e.seq, "entry stored under " + e.server + " with " + e.detail);
    }
  }
  const bool split = ctx.config.cache_partitioning == CachePartitioning::ByValidationState;
  auto partition_ok = [&](const CacheKey& key, const CacheEntry& entry) {
    if (!split) return key.partition == Partition::Unified;
    if (key.partition == Partition::Validated) return entry.validated;
    if (key.partition == Partition::Unvalidated) return !entry.validated;
    return false;
  };
  for (const auto& hit : run.hits) {
    if (hit.entry.origin != hit.key.server) {
      return violation(hit.seq, "hit on " + to_string(hit.key) + " returned data from " + hit.entry.origin);
    }
    if (!partition_ok(hit.key, hit.entry)) {
      return violation(hit.seq, "hit on " + to_string(hit.key) + " crosses validation partitions");
    }
    if (split && !hit.cd && hit.key.partition != Partition::Validated) {
      return violation(hit.seq, "validating lookup served from " + to_string(hit.key));
    }
  }
  for (const auto& [key, entry] : run.cache) {
    if (entry.origin != key.server) {
      return violation(Violation::kNoEvent, "final entry " + to_string(key) + " holds data from " + entry.origin);
    }
    if (!partition_ok(key, entry)) {
      return violation(Violation::kNoEvent, "final entry " + to_string(key) + " is in the wrong partition");
    }
  }
  return std::nullopt;
}

std::optional<Violation> atomic_expiration(const RunResult& run, CheckContext&) {
  struct State {
    EntryStatus status = EntryStatus::Active;
    std::uint64_t version = 0;
  };
  std::map<std::string, State> entries;
  for (const Event& e : run.trace.events()) {
    const std::string key = key_of(e);
    switch (e.kind) {
      case EventKind::CacheInsert: entries[key] = {EntryStatus::Active, e.version}; break;
      case EventKind::CacheExpire: {
        auto it = entries.find(key);
        if (it == entries.end()) return violation(e.seq, "expiry of absent entry " + key);
        it->second.status = EntryStatus::Expired;
        break;
      }
      case EventKind::CacheLookup: {
        auto it = entries.find(key);
        if (e.status == "hit") {
          if (it == entries.end()) return violation(e.seq, "hit on never-inserted entry " + key);
          if (it->second.status == EntryStatus::Expired) return violation(e.seq, "hit on expired entry " + key);
          if (it->second.version != e.version) return violation(e.seq, "hit on " + key + " returned a stale version");
        } else if (e.status == "miss-expired") {
          if (it == entries.end() || it->second.status != EntryStatus::Expired) {
            return violation(e.seq, "active entry " + key + " reported as expired");
          }
        } else if (it != entries.end() && e.status == "miss") {
          return violation(e.seq, "present entry " + key + " reported as missing");
        }
        break;
      }
      default: break;
    }
  }
  return std::nullopt;
}

std::optional<Violation> mutual_exclusion(const RunResult& run, CheckContext&) {
  std::map<std::string, ActivityId> holder;
  for (const Event& e : run.trace.events()) {
    if (e.kind == EventKind::LockAcquire) {
      auto [it, fresh] = holder.emplace(key_of(e), e.activity);
      if (!fresh) {
        return violation(e.seq, "activity " + std::to_string(e.activity) + " acquired " + key_of(e) +
                                    " held by activity " + std::to_string(it->second));
      }
    } else if (e.kind == EventKind::LockRelease) {
      auto it = holder.find(key_of(e));
      if (it == holder.end() || it->second != e.activity) return violation(e.seq, "release of " + key_of(e) + " by a non-holder");
      holder.erase(it);
    } else if (e.kind == EventKind::CacheLookup || e.kind == EventKind::CacheInsert ||
               e.kind == EventKind::CacheExpire) {
      auto it = holder.find(key_of(e));
      if (it == holder.end() || it->second != e.activity) {
        return violation(e.seq, std::string(to_string(e.kind)) + " on " + key_of(e) + " without holding its lock");
      }
    }
  }
  return std::nullopt;
}

std::optional<Violation> state_synchronization(const RunResult& run, CheckContext&) {
  std::map<std::string, std::uint64_t> current;
  std::map<std::string, std::uint64_t> released;
  for (const Event& e : run.trace.events()) {
    const std::string key = key_of(e);
    if (e.kind == EventKind::CacheInsert) current[key] = e.version;
    if (e.kind == EventKind::LockRelease) released[key] = current[key];
    if (e.kind == EventKind::CacheLookup && (e.status == "hit" || e.status == "miss-expired")) {
      if (e.version < released[key]) {
        return violation(e.seq, "lookup of " + key + " saw version " + std::to_string(e.version) +
                                    " after version " + std::to_string(released[key]) + " was published");
      }
    }
  }
  return std::nullopt;
}

std::optional<Violation> termination(const RunResult& run, CheckContext&) {
  if (!run.completed) return violation(Violation::kNoEvent, "run did not complete: " + run.failure);
  std::map<std::uint64_t, std::size_t> open;
  for (const Event& e : run.trace.events()) {
    if (e.kind == EventKind::ClientQuery) open[e.qid] = e.seq;
    if (e.kind == EventKind::ClientResponse) open.erase(e.qid);
  }
  if (!open.empty()) return violation(open.begin()->second, "client query without a response");
  return std::nullopt;
}

bool resolver_event(EventKind k) {
  switch (k) {
    case EventKind::ResolverQuery:
    case EventKind::ServerSend:
    case EventKind::ResolverReceive:
    case EventKind::CacheLookup:
    case EventKind::CacheInsert:
    case EventKind::CacheExpire:
    case EventKind::LockAcquire:
    case EventKind::LockRelease:
    case EventKind::AcceptEvent: return true;
    default: return false;
  }
}

std::optional<Violation> resource_reclamation(const RunResult& run, CheckContext& ctx) {
  if (run.completed && run.outstanding_locks != 0) {
    return violation(Violation::kNoEvent, std::to_string(run.outstanding_locks) + " locks still held at quiescence");
  }
  struct Hold {
    std::size_t seq;
    int steps;
  };
  std::map<std::pair<ActivityId, std::string>, Hold> holds;
  std::map<ActivityId, int> started;
  for (const Event& e : run.trace.events()) {
    if (e.kind == EventKind::ActivityStart) ++started[e.activity];
    if (e.kind == EventKind::ActivityEnd) --started[e.activity];
    if (!resolver_event(e.kind)) continue;
    for (auto& [who, hold] : holds) {
      if (who.first == e.activity && ++hold.steps > ctx.config.delta) {
        return violation(e.seq, "lock on " + who.second + " held for more than " +
                                    std::to_string(ctx.config.delta) + " steps");
      }
    }
    if (e.kind == EventKind::LockAcquire) holds[{e.activity, key_of(e)}] = {e.seq, 0};
    if (e.kind == EventKind::LockRelease) holds.erase({e.activity, key_of(e)});
  }
  if (run.completed) {
    for (const auto& [who, n] : started) {
      if (n != 0) return violation(Violation::kNoEvent, "activity " + std::to_string(who) + " never ended");
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------- P9-P12

std::optional<Violation> data_origin(const RunResult& run, CheckContext&) {
  std::set<std::pair<std::string, std::string>> signed_pairs;
  for (const Event& e : run.trace.events()) {
    if (e.kind == EventKind::SignEvent) signed_pairs.insert({e.key_id, e.digest});
    if (e.kind == EventKind::AcceptEvent && e.status == to_string(SecurityState::Secure) &&
        !signed_pairs.contains({e.key_id, e.digest})) {
      return violation(e.seq, "accepted " + (e.name ? e.name->to_string() : "") +
                                  " without an earlier signing by key " + e.key_id);
    }
  }
  return std::nullopt;
}

std::optional<Violation> record_validation(const RunResult& run, CheckContext& ctx) {
  auto [fact, fresh] = ctx.static_facts.emplace("zones-validate", true);
  if (fresh) {
    for (const auto& srv : ctx.topology->servers) {
      const ZoneKeys keys = honest_keys(srv.zone, ctx.config);
      if (keys.state != SecurityState::Secure) {
        fact->second = false;
        break;
      }
      const Zone& z = srv.zone.zone();
      auto check = [&](const RRSet& set) {
        if (set.type == RecordType::NS && set.owner != z.apex()) return true;  // delegation, unsigned
        if (z.delegation_for(set.owner) && set.type != RecordType::DS && set.type != RecordType::NSEC) return true;
        return validate_rrset(set, keys, ctx.config).state == SecurityState::Secure;
      };
      for (const auto& [k, set] : z.rrsets()) fact->second = fact->second && check(set);
      for (const auto& [h, set] : z.nsec3_rrsets()) fact->second = fact->second && check(set);
    }
  }
  if (!fact->second) return violation(Violation::kNoEvent, "an authoritative RRset does not validate under its zone keys");
  for (const auto& a : run.accepted) {
    if (!is_secure(a)) continue;
    if (!verifying_rrsig(a.accepted, ctx.config)) {
      return violation(a.seq, "accepted " + describe(a) + " has no RRSIG verifying under the accepted key");
    }
  }
  return std::nullopt;
}

/// Every value obtained by changing exactly one field of the RRset or of
/// the RRSIG.
std::vector<std::pair<RRSet, ResourceRecord>> single_field_mutations(const RRSet& set, const ResourceRecord& sig) {
  std::vector<std::pair<RRSet, ResourceRecord>> out;
  const PublicKey stranger = public_key_of(Term::fresh("mutant", 0, "harness"));
  const DomainName elsewhere = set.owner.child("mutated");

  {
    RRSet moved = set;
    moved.owner = elsewhere;
    for (auto& rr : moved.records) rr.owner = elsewhere;
    out.emplace_back(std::move(moved), sig);
  }
  for (std::size_t i = 0; i < set.records.size(); ++i) {
    auto mutate = [&](auto&& change) {
      RRSet m = set;
      change(m.records[i].rdata);
      out.emplace_back(std::move(m), sig);
    };
    std::visit(
        [&](const auto& data) {
          using T = std::decay_t<decltype(data)>;
          if constexpr (std::is_same_v<T, AData>) {
            mutate([](Rdata& r) { std::get<AData>(r).address += "0"; });
          } else if constexpr (std::is_same_v<T, NsData>) {
            mutate([&](Rdata& r) { std::get<NsData>(r).target = std::get<NsData>(r).target.child("m"); });
          } else if constexpr (std::is_same_v<T, MxData>) {
            mutate([&](Rdata& r) { std::get<MxData>(r).exchange = std::get<MxData>(r).exchange.child("m"); });
          } else if constexpr (std::is_same_v<T, DnskeyData>) {
            mutate([](Rdata& r) { std::get<DnskeyData>(r).flags ^= 1; });
            mutate([](Rdata& r) { std::get<DnskeyData>(r).algorithm.code += 1; });
            mutate([&](Rdata& r) { std::get<DnskeyData>(r).key = stranger; });
          } else if constexpr (std::is_same_v<T, DsData>) {
            mutate([](Rdata& r) { std::get<DsData>(r).key_tag += 1; });
            mutate([](Rdata& r) { std::get<DsData>(r).algorithm.code += 1; });
            mutate([](Rdata& r) { std::get<DsData>(r).digest_type += 1; });
            mutate([](Rdata& r) { std::get<DsData>(r).digest = Digest{Term::atom("mutated")}; });
          } else if constexpr (std::is_same_v<T, NsecData>) {
            mutate([](Rdata& r) { std::get<NsecData>(r).next = std::get<NsecData>(r).next.child("m"); });
            mutate([](Rdata& r) {
              auto& types = std::get<NsecData>(r).types;
              if (!types.erase(RecordType::A)) types.insert(RecordType::A);
            });
          } else if constexpr (std::is_same_v<T, Nsec3Data>) {
            mutate([](Rdata& r) { std::get<Nsec3Data>(r).next_hashed.value += "0"; });
            mutate([](Rdata& r) { std::get<Nsec3Data>(r).params.iterations += 1; });
            mutate([](Rdata& r) {
              auto& types = std::get<Nsec3Data>(r).types;
              if (!types.erase(RecordType::A)) types.insert(RecordType::A);
            });
          } else if constexpr (std::is_same_v<T, RrsigData>) {
            mutate([](Rdata& r) { std::get<RrsigData>(r).labels += 1; });
          }
        },
        set.records[i].rdata);
  }
  auto mutate_sig = [&](auto&& change) {
    ResourceRecord m = sig;
    change(m.as<RrsigData>());
    out.emplace_back(set, std::move(m));
  };
  mutate_sig([](RrsigData& d) { d.type_covered = d.type_covered == RecordType::A ? RecordType::MX : RecordType::A; });
  mutate_sig([](RrsigData& d) { d.algorithm.code = d.algorithm.code == 8 ? 13 : 8; });
  mutate_sig([](RrsigData& d) { d.labels += 1; });
  mutate_sig([](RrsigData& d) { d.labels -= 1; });
  mutate_sig([](RrsigData& d) { d.key_tag += 1; });
  mutate_sig([](RrsigData& d) { d.signer = d.signer.child("m"); });
  mutate_sig([](RrsigData& d) { d.signature.reset(); });
  mutate_sig([&](RrsigData& d) { d.signature = Signature{Term::atom("forged")}; });
  return out;
}

std::optional<Violation> integrity_preservation(const RunResult& run, CheckContext& ctx) {
  for (const auto& a : run.accepted) {
    if (!is_secure(a) || !ctx.checked_digests.insert(a.accepted.message_digest).second) continue;
    const ResourceRecord* sig = verifying_rrsig(a.accepted, ctx.config);
    if (!sig) return violation(a.seq, "accepted " + describe(a) + " has no verifying RRSIG");
    for (const auto& [set, msig] : single_field_mutations(a.accepted.rrset, *sig)) {
      if (validate_rrsig(set, msig, a.accepted.key, ctx.config) == RrsigResult::Ok) {
        return violation(a.seq, "a single-field mutation of " + describe(a) + " still verifies");
      }
    }
  }
  return std::nullopt;
}

/// Honest path of DS/DNSKEY links from the root to `apex`.
std::vector<ChainLink> honest_path(const Topology& t, const DomainName& apex) {
  std::vector<const NameServer*> levels;
  for (const auto& s : t.servers) {
    if (apex.is_subdomain_of(s.zone.apex())) levels.push_back(&s);
  }
  std::sort(levels.begin(), levels.end(), [](const NameServer* a, const NameServer* b) {
    return a->zone.apex().label_count() < b->zone.apex().label_count();
  });
  std::vector<ChainLink> path;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const Zone& z = levels[i]->zone.zone();
    ChainLink link{z.apex(), {}, {}};
    if (const RRSet* keys = z.find(z.apex(), RecordType::DNSKEY)) link.dnskeys = *keys;
    if (i + 1 < levels.size()) {
      if (const RRSet* ds = z.find(levels[i + 1]->zone.apex(), RecordType::DS)) link.ds_to_next = *ds;
    }
    path.push_back(std::move(link));
  }
  return path;
}

std::optional<Violation> chain_integrity(const RunResult& run, CheckContext& ctx) {
  for (const auto& a : run.accepted) {
    if (!is_secure(a)) continue;
    const NameServer& srv = server_by_apex(*ctx.topology, a.accepted.zone);
    const RRSet* keys = srv.zone.zone().find(srv.zone.apex(), RecordType::DNSKEY);
    const bool published = keys && std::any_of(keys->records.begin(), keys->records.end(), [&](const ResourceRecord& rr) {
                             return rr.as<DnskeyData>() == a.accepted.key;
                           });
    if (!published) return violation(a.seq, "accepted " + describe(a) + " under a key the zone never published");
    auto [fact, fresh] = ctx.static_facts.emplace("chain:" + a.accepted.zone.to_string(), false);
    if (fresh) {
      const auto path = honest_path(*ctx.topology, a.accepted.zone);
      fact->second = !path.empty() && path.front().apex.is_root() &&
                     verify_chain(ctx.topology->anchor, path, ctx.config).valid;
    }
    if (!fact->second) {
      return violation(a.seq, "accepted " + describe(a) + " though no chain of trust reaches " +
                                  a.accepted.zone.to_string());
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------- P13-P19

PropertyCheck executability(RecordType family) {
  return [family](const RunResult& run, CheckContext&) -> std::optional<Violation> {
    for (const auto& a : run.accepted) {
      if (is_secure(a) && a.accepted.rrset.type == family) return std::nullopt;
    }
    return violation(Violation::kNoEvent, std::string("no Secure ") + to_string(family) + " acceptance");
  };
}

PropertyCheck domain_secrecy(DenialFamily family) {
  return [family](const RunResult& run, CheckContext& ctx) -> std::optional<Violation> {
    NameSet guarded;
    for (const auto& srv : ctx.topology->servers) {
      const Zone& z = srv.zone.zone();
      for (const auto& d : ctx.topology->secret_names) {
        if (!d.is_subdomain_of(z.apex()) || z.delegation_for(d)) continue;
        const bool nsec = z.chain_mode() == ChainMode::NsecOnly;
        const bool nsec3 = z.chain_mode() == ChainMode::Nsec3Only;
        bool in_family = family == DenialFamily::Nsec ? nsec : nsec3;
        if (z.chain_mode() == ChainMode::Mixed) {
          auto it = z.assignment().find(d);
          in_family = it != z.assignment().end() && it->second == family;
        }
        if (in_family) guarded.insert(d);
      }
    }
    NameSet queried_below;  // names with a query at or below them so far
    for (const Event& e : run.trace.events()) {
      if (e.kind == EventKind::ResolverQuery && e.name) {
        for (DomainName n = *e.name;; n = n.parent()) {
          queried_below.insert(n);
          if (n.is_root()) break;
        }
      }
      if (e.kind == EventKind::KnowledgeGrow && e.name && guarded.contains(*e.name) &&
          !queried_below.contains(*e.name)) {
        return violation(e.seq, "adversary learned " + e.name->to_string() + " before any query named it");
      }
    }
    return std::nullopt;
  };
}

/// True iff the denial records answering `q` match or cover it.
bool covers(const std::vector<const AcceptRecord*>& proof, const Query& q, const DomainName& apex) {
  for (const AcceptRecord* a : proof) {
    for (const auto& rr : a->accepted.rrset.records) {
      if (rr.type() == RecordType::NSEC) {
        const auto& d = rr.as<NsecData>();
        if (rr.owner == q.qname || nsec_covers(rr.owner, d.next, q.qname)) return true;
      } else if (rr.type() == RecordType::NSEC3) {
        const auto& d = rr.as<Nsec3Data>();
        const HashedLabel owner{rr.owner.labels().front()};
        for (DomainName n = q.qname; n.is_subdomain_of(apex); n = n.parent()) {
          const HashedLabel h = nsec3_hash(n, d.params);
          if (h == owner || nsec3_covers(owner, d.next_hashed, h)) return true;
          if (n == apex) break;
        }
      }
    }
  }
  return false;
}

PropertyCheck result_authentication(RecordType family) {
  return [family](const RunResult& run, CheckContext& ctx) -> std::optional<Violation> {
    std::map<std::uint64_t, std::vector<const AcceptRecord*>> by_query;
    for (const auto& a : run.accepted) {
      if (is_secure(a) && a.accepted.rrset.type == family) by_query[a.query.qid].push_back(&a);
    }
    // fingerprint -> first ServerSend carrying it
    std::map<std::string, std::size_t> sent;
    for (const Event& e : run.trace.events()) {
      if (e.kind != EventKind::ServerSend) continue;
      for (const auto& f : e.records) sent.emplace(f, e.seq);
    }
    for (const auto& [qid, proof] : by_query) {
      const Query& q = proof.front()->query;
      const AcceptRecord& first = *proof.front();
      for (const AcceptRecord* a : proof) {
        for (const auto& rr : a->accepted.rrset.records) {
          auto it = sent.find(fingerprint(rr));
          if (it == sent.end() || it->second > a->seq) {
            return violation(a->seq, "accepted " + describe(*a) + " that no server sent earlier");
          }
        }
        const ResourceRecord* sig = verifying_rrsig(a->accepted, ctx.config);
        if (!sig || static_cast<std::size_t>(sig->as<RrsigData>().labels) !=
                        a->accepted.rrset.owner.signature_label_count()) {
          return violation(a->seq, "accepted " + describe(*a) + " with a label count that does not fit its owner");
        }
      }
      const Zone& zone = server_by_apex(*ctx.topology, first.accepted.zone).zone.zone();
      if (!covers(proof, q, zone.apex())) {
        return violation(first.seq, "denial accepted for " + q.qname.to_string() + " does not cover it");
      }
      const NameSet existing = zone.existing_names();
      if (existing.contains(q.qname) && zone.types_at(q.qname).contains(q.qtype) &&
          !zone.delegation_for(q.qname)) {
        return violation(first.seq, "denial accepted for " + q.qname.to_string() + "/" + to_string(q.qtype) +
                                        " which the zone holds");
      }
    }
    return std::nullopt;
  };
}

/// Successor of `n` among `owners` in canonical order, wrapping to the first.
DomainName canonical_successor(const NameSet& owners, const DomainName& n) {
  auto it = owners.upper_bound(n);
  return it == owners.end() ? *owners.begin() : *it;
}

std::optional<Violation> denial_correctness(const RunResult& run, CheckContext& ctx) {
  for (const auto& a : run.accepted) {
    const RecordType type = a.accepted.rrset.type;
    if (!is_secure(a) || (type != RecordType::NSEC && type != RecordType::NSEC3)) continue;
    const Zone& zone = server_by_apex(*ctx.topology, a.accepted.zone).zone.zone();
    const NameSet owners = zone.authoritative_names();
    for (const auto& rr : a.accepted.rrset.records) {
      if (rr.type() == RecordType::NSEC) {
        const DomainName expected = canonical_successor(owners, rr.owner);
        if (rr.as<NsecData>().next != expected) {
          return violation(a.seq, "NSEC " + rr.owner.to_string() + " skips " + expected.to_string());
        }
        continue;
      }
      const auto& d = rr.as<Nsec3Data>();
      std::map<HashedLabel, DomainName> unhash;
      for (const auto& n : zone.existing_names()) unhash.emplace(nsec3_hash(n, d.params), n);
      const HashedLabel owner{rr.owner.labels().front()};
      auto from = unhash.find(owner);
      auto to = unhash.find(d.next_hashed);
      if (from == unhash.end() || to == unhash.end()) {
        return violation(a.seq, "NSEC3 " + owner.value + " links hashes of no zone name");
      }
      if (zone.chain_mode() == ChainMode::Mixed) {
        const DomainName expected = canonical_successor(owners, from->second);
        if (to->second != expected) {
          return violation(a.seq, "NSEC3 of " + from->second.to_string() + " spans to " + to->second.to_string() +
                                      " and denies the existing " + expected.to_string());
        }
      } else {
        for (const auto& [h, name] : unhash) {
          if (nsec3_covers(owner, d.next_hashed, h)) {
            return violation(a.seq, "NSEC3 of " + from->second.to_string() + " denies the existing " + name.to_string());
          }
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace

// ---------------------------------------------------------------- registry

const std::map<int, PropertyCheck>& property_checkers() {
  static const std::map<int, PropertyCheck> checkers{
      {1, cache_hit_consistency},
      {2, cache_miss_atomicity},
      {3, server_partitioning},
      {4, atomic_expiration},
      {5, mutual_exclusion},
      {6, state_synchronization},
      {7, termination},
      {8, resource_reclamation},
      {9, data_origin},
      {10, record_validation},
      {11, integrity_preservation},
      {12, chain_integrity},
      {13, executability(RecordType::NSEC)},
      {14, domain_secrecy(DenialFamily::Nsec)},
      {15, result_authentication(RecordType::NSEC)},
      {16, executability(RecordType::NSEC3)},
      {17, domain_secrecy(DenialFamily::Nsec3)},
      {18, result_authentication(RecordType::NSEC3)},
      {19, denial_correctness},
  };
  return checkers;
}

void require_full_coverage(const std::map<int, PropertyCheck>& checkers) {
  std::string missing;
  for (const auto& p : property_catalog()) {
    if (!checkers.contains(p.id)) missing += (missing.empty() ? "" : ", ") + std::to_string(p.id);
  }
  if (!missing.empty()) throw ContractViolation("no checker for property ids " + missing);
}

std::vector<Verdict> check_properties(const Scenario& s, const std::vector<int>& ids, SeedRange seeds) {
  const auto& checkers = property_checkers();
  require_full_coverage(checkers);
  for (int id : ids) property_info(id);

  CheckContext ctx{std::make_shared<const Topology>(build_topology(s)), s.resolver, {}, {}};
  std::vector<Verdict> verdicts;
  std::vector<bool> decided;
  for (int id : ids) {
    const PropertyInfo& info = property_info(id);
    Verdict v{id, std::string(info.name), PropertyOutcome::Holds, 0, std::nullopt, std::nullopt, ""};
    if (info.quantifier == Quantifier::Existential) v.outcome = PropertyOutcome::Falsified;
    verdicts.push_back(std::move(v));
    decided.push_back(false);
  }

  for (std::uint64_t seed = seeds.first; seed < seeds.first + seeds.count; ++seed) {
    if (std::all_of(decided.begin(), decided.end(), [](bool d) { return d; })) break;
    const RunResult run = run_scenario(s, seed, ctx.topology);
    for (std::size_t i = 0; i < verdicts.size(); ++i) {
      if (decided[i]) continue;
      Verdict& v = verdicts[i];
      ++v.seeds_explored;
      std::optional<Violation> found = checkers.at(v.id)(run, ctx);
      if (property_info(v.id).quantifier == Quantifier::Existential) {
        if (!found) {
          v.outcome = PropertyOutcome::Holds;
          v.counterexample_seed.reset();
          v.violation.reset();
          decided[i] = true;
        } else if (!v.violation) {
          v.counterexample_seed = seed;
          v.violation = found;
        }
      } else if (found) {
        v.outcome = PropertyOutcome::Falsified;
        v.counterexample_seed = seed;
        v.violation = found;
        v.counterexample_trace = run.trace.dump();
        decided[i] = true;
      }
    }
  }
  return verdicts;
}

Verdict check_property(int id, const Scenario& s, SeedRange seeds) {
  return check_properties(s, {id}, seeds).front();
}

bool replays(const Scenario& s, const Verdict& v) {
  if (v.outcome != PropertyOutcome::Falsified || !v.counterexample_seed) return false;
  const Verdict again = check_property(v.id, s, SeedRange{*v.counterexample_seed, 1});
  return again.outcome == PropertyOutcome::Falsified && again.violation && v.violation &&
         again.violation->event == v.violation->event && again.counterexample_trace == v.counterexample_trace;
}

// ---------------------------------------------------------------- parsing

namespace {

std::uint64_t parse_number(std::string_view text, std::string_view what) {
  std::uint64_t v = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty()) {
    throw ContractViolation("malformed " + std::string(what) + " \"" + std::string(text) + "\"");
  }
  return v;
}

std::pair<std::uint64_t, std::uint64_t> parse_span(std::string_view part, std::string_view what) {
  const auto dash = part.find('-');
  if (dash == std::string_view::npos) {
    const auto v = parse_number(part, what);
    return {v, v};
  }
  const auto lo = parse_number(part.substr(0, dash), what);
  const auto hi = parse_number(part.substr(dash + 1), what);
  if (hi < lo) throw ContractViolation("empty " + std::string(what) + " range \"" + std::string(part) + "\"");
  return {lo, hi};
}

}  // namespace

std::vector<int> parse_property_list(std::string_view text) {
  std::vector<int> ids;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto part = text.substr(0, comma);
    const auto [lo, hi] = parse_span(part, "property list");
    for (std::uint64_t id = lo; id <= hi; ++id) {
      if (id > 1000) throw ContractViolation("unknown property id " + std::to_string(id));
      property_info(static_cast<int>(id));
      if (std::find(ids.begin(), ids.end(), static_cast<int>(id)) == ids.end()) ids.push_back(static_cast<int>(id));
    }
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (ids.empty()) throw ContractViolation("empty property list");
  return ids;
}

SeedRange parse_seed_range(std::string_view text) {
  const auto [lo, hi] = parse_span(text, "seed range");
  return SeedRange{lo, hi - lo + 1};
}

// ---------------------------------------------------------------- reports

std::string format_report(const std::vector<Verdict>& verdicts, const std::map<int, Expectation>& expected,
                          ReportFormat format, const std::map<int, std::string>& trace_paths) {
  auto expectation = [&](int id) -> std::optional<Expectation> {
    auto it = expected.find(id);
    if (it == expected.end()) return std::nullopt;
    return it->second;
  };
  auto as_expected = [&](const Verdict& v) {
    const auto e = expectation(v.id);
    if (!e) return true;
    return (*e == Expectation::Holds) == (v.outcome == PropertyOutcome::Holds);
  };

  std::ostringstream out;
  if (format == ReportFormat::JsonLines) {
    for (const auto& v : verdicts) {
      const PropertyInfo& info = property_info(v.id);
      nlohmann::ordered_json j;
      j["id"] = v.id;
      j["group"] = info.group;
      j["name"] = info.name;
      j["cache"] = info.cache;
      j["result"] = to_string(v.outcome);
      j["bounded"] = true;
      j["seeds_explored"] = v.seeds_explored;
      const auto e = expectation(v.id);
      j["expected"] = e ? nlohmann::ordered_json(to_string(*e)) : nlohmann::ordered_json(nullptr);
      j["as_expected"] = as_expected(v);
      j["counterexample_seed"] =
          v.counterexample_seed ? nlohmann::ordered_json(*v.counterexample_seed) : nlohmann::ordered_json(nullptr);
      if (v.violation) {
        j["violation"] = {{"event", v.violation->event == Violation::kNoEvent
                                        ? nlohmann::ordered_json(nullptr)
                                        : nlohmann::ordered_json(v.violation->event)},
                          {"message", v.violation->message}};
      } else {
        j["violation"] = nullptr;
      }
      auto path = trace_paths.find(v.id);
      j["counterexample_path"] = path == trace_paths.end() ? nlohmann::ordered_json(nullptr)
                                                           : nlohmann::ordered_json(path->second);
      out << j.dump() << "\n";
    }
    return out.str();
  }

  char line[256];
  std::snprintf(line, sizeof line, "%-3s %-23s %-33s %-6s %-10s %-10s %-8s %s\n", "#", "Analysis Group",
                "Property Description", "Cache", "Result", "Expected", "Seeds", "Counterexample");
  out << line;
  for (const auto& v : verdicts) {
    const PropertyInfo& info = property_info(v.id);
    const auto e = expectation(v.id);
    std::string cx = "-";
    if (v.outcome == PropertyOutcome::Falsified && v.counterexample_seed) {
      cx = "seed " + std::to_string(*v.counterexample_seed);
      if (v.violation && v.violation->event != Violation::kNoEvent) cx += " event #" + std::to_string(v.violation->event);
      if (v.violation) cx += ": " + v.violation->message;
    } else if (v.outcome == PropertyOutcome::Falsified && v.violation) {
      cx = v.violation->message;
    }
    std::snprintf(line, sizeof line, "%-3d %-23s %-33s %-6s %-10s %-10s %-8llu ", v.id, std::string(info.group).c_str(),
                  std::string(info.name).c_str(), info.cache ? "yes" : "no", to_string(v.outcome),
                  e ? to_string(*e) : "-", static_cast<unsigned long long>(v.seeds_explored));
    out << line << cx << (as_expected(v) ? "" : "  [UNEXPECTED]") << "\n";
  }
  out << "Holds means no violation in the explored seeds (bounded testing, not proof).\n";
  return out.str();
}

}  // namespace dnssec
