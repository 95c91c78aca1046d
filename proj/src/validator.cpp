#include "dnssec/validator.hpp"

#include <algorithm>

#include "dnssec/errors.hpp"

namespace dnssec {

std::string key_fingerprint(const PublicKey& key) { return short_digest(key.term.to_string()); }

const char* to_string(DenialKind k) {
  switch (k) {
    case DenialKind::ProvenNonexistent: return "ProvenNonexistent";
    case DenialKind::ProvenNoData: return "ProvenNoData";
    case DenialKind::Invalid: return "Invalid";
  }
  return "?";
}

RrsigResult validate_rrsig(const RRSet& rrset, const ResourceRecord& sig, const DnskeyData& key,
                           const ResolverConfig& cfg) {
  if (sig.type() != RecordType::RRSIG || rrset.records.empty()) return RrsigResult::Bogus;
  const auto& f = sig.as<RrsigData>();
  if (!cfg.supports(f.algorithm)) return RrsigResult::UnsupportedAlgorithm;
  if (f.type_covered != rrset.type || sig.owner != rrset.owner) return RrsigResult::Bogus;
  if (key.algorithm != f.algorithm || !f.signature) return RrsigResult::Bogus;
  if (f.labels < 0 || static_cast<std::size_t>(f.labels) > rrset.owner.signature_label_count()) {
    return RrsigResult::Bogus;
  }
  const std::string input = signing_input(f, rrset.owner, rrset.type, rrset.records);
  return verify(*f.signature, input, key.key) ? RrsigResult::Ok : RrsigResult::Bogus;
}

namespace {

RRsetVerdict failed(SecurityState state, std::string reason) {
  RRsetVerdict v;
  v.state = state;
  v.reason = std::move(reason);
  return v;
}

RRsetVerdict unsupported_verdict(const ResolverConfig& cfg) {
  RRsetVerdict v;
  v.state = cfg.downgrade_policy == DowngradePolicy::Permissive ? SecurityState::Insecure
                                                                : SecurityState::Bogus;
  v.reason = "unsupported algorithm";
  return v;
}

/// Tries every RRSIG on `rrset` against every key in `keys`; only signatures
/// whose signer is `signer` are considered.
RRsetVerdict check_signatures(const RRSet& rrset, const DomainName& signer,
                              const std::vector<DnskeyData>& keys, const ResolverConfig& cfg) {
  if (rrset.rrsigs.empty()) return failed(SecurityState::Bogus, "missing signature");
  bool all_unsupported = true;
  for (const auto& sig : rrset.rrsigs) {
    const auto& f = sig.as<RrsigData>();
    if (cfg.supports(f.algorithm)) all_unsupported = false;
    if (f.signer != signer) continue;
    for (const auto& key : keys) {
      if (validate_rrsig(rrset, sig, key, cfg) == RrsigResult::Ok) {
        RRsetVerdict v = failed(SecurityState::Secure, "");
        v.key = key;
        v.rrsig = &sig;
        v.message_digest = short_digest(signing_input(f, rrset.owner, rrset.type, rrset.records));
        return v;
      }
    }
  }
  if (all_unsupported) return unsupported_verdict(cfg);
  return failed(SecurityState::Bogus, "signature verification failed");
}

}  // namespace

RRsetVerdict validate_rrset(const RRSet& rrset, const ZoneKeys& keys, const ResolverConfig& cfg) {
  if (keys.state != SecurityState::Secure) return failed(keys.state, keys.reason);
  return check_signatures(rrset, keys.apex, keys.keys, cfg);
}

ZoneKeys verify_link(const DomainName& apex, const std::vector<ResourceRecord>& ds_set,
                     const RRSet& dnskeys, const ResolverConfig& cfg) {
  ZoneKeys out{apex, {}, SecurityState::Bogus, {}};
  if (ds_set.empty()) {
    out.reason = "no DS";
    return out;
  }
  if (dnskeys.records.empty() || dnskeys.owner != apex || dnskeys.type != RecordType::DNSKEY) {
    out.reason = "no DNSKEY";
    return out;
  }

  std::vector<DnskeyData> all;
  for (const auto& rr : dnskeys.records) {
    if (rr.type() == RecordType::DNSKEY) all.push_back(rr.as<DnskeyData>());
  }

  bool ds_supported = false;
  std::vector<DnskeyData> bound;
  for (const auto& ds_rr : ds_set) {
    if (ds_rr.type() != RecordType::DS || ds_rr.owner != apex) continue;
    const auto& ds = ds_rr.as<DsData>();
    if (!cfg.supports(ds.algorithm)) continue;
    ds_supported = true;
    for (const auto& k : all) {
      if (k.is_ksk() && k.algorithm == ds.algorithm && dnskey_digest(apex, k) == ds.digest) {
        bound.push_back(k);
      }
    }
  }
  if (!ds_supported) {
    const RRsetVerdict v = unsupported_verdict(cfg);
    out.state = v.state;
    out.reason = v.reason;
    return out;
  }
  if (bound.empty()) {
    out.reason = "no DNSKEY matches the DS";
    return out;
  }

  const RRsetVerdict by_ksk = check_signatures(dnskeys, apex, bound, cfg);
  if (by_ksk.state != SecurityState::Secure) {
    if (by_ksk.reason == "unsupported algorithm") {
      out.state = by_ksk.state;
      out.reason = by_ksk.reason;
      return out;
    }
    out.reason = "DNSKEY not signed by a bound KSK";
    return out;
  }
  std::vector<DnskeyData> zsks;
  for (const auto& k : all) {
    if (!k.is_ksk() && cfg.supports(k.algorithm)) zsks.push_back(k);
  }
  const RRsetVerdict by_zsk = check_signatures(dnskeys, apex, zsks, cfg);
  if (by_zsk.state != SecurityState::Secure) {
    if (by_zsk.reason == "unsupported algorithm") {
      out.state = by_zsk.state;
      out.reason = by_zsk.reason;
      return out;
    }
    out.reason = "DNSKEY not signed by a ZSK";
    return out;
  }

  for (const auto& k : all) {
    if (cfg.supports(k.algorithm)) out.keys.push_back(k);
  }
  out.state = SecurityState::Secure;
  return out;
}

ChainResult verify_chain(const TrustAnchor& anchor, const std::vector<ChainLink>& path,
                         const ResolverConfig& cfg) {
  std::optional<ZoneKeys> parent;
  for (std::size_t i = 0; i < path.size(); ++i) {
    std::vector<ResourceRecord> ds = anchor.ds;
    if (parent) {
      const RRSet& link_ds = path[i - 1].ds_to_next;
      if (link_ds.owner != path[i].apex ||
          validate_rrset(link_ds, *parent, cfg).state != SecurityState::Secure) {
        return ChainResult{false, i};
      }
      ds = link_ds.records;
    }
    ZoneKeys keys = verify_link(path[i].apex, ds, path[i].dnskeys, cfg);
    if (keys.state != SecurityState::Secure) return ChainResult{false, i};
    parent = std::move(keys);
  }
  return ChainResult{true, 0};
}

// ---------------------------------------------------------------- denial

namespace {

struct NsecEntry {
  DomainName owner;
  const NsecData* data;
};

struct Nsec3Entry {
  HashedLabel owner;
  const Nsec3Data* data;
};

class ProofIndex {
 public:
  ProofIndex(const std::vector<ResourceRecord>& proof, const ZoneKeys& keys,
             const ResolverConfig& cfg)
      : apex_(keys.apex), cfg_(cfg) {
    for (const auto& rr : proof) {
      if (rr.type() == RecordType::NSEC || rr.type() == RecordType::NSEC3 ||
          (rr.type() == RecordType::RRSIG && (rr.covered_type() == RecordType::NSEC ||
                                              rr.covered_type() == RecordType::NSEC3))) {
        records_.push_back(rr);
      }
    }
    sets_ = group_rrsets(records_);
    for (const auto& set : sets_) {
      for (const auto& rr : set.records) {
        if (rr.type() == RecordType::NSEC) {
          nsec_.push_back({rr.owner, &rr.as<NsecData>()});
          families_.insert(DenialFamily::Nsec);
        } else if (rr.type() == RecordType::NSEC3) {
          const auto& d = rr.as<Nsec3Data>();
          if (rr.owner.is_root() || rr.owner.parent() != apex_) {
            error_ = "NSEC3 owner outside the zone";
            continue;
          }
          if (params_ && !(*params_ == d.params)) error_ = "inconsistent NSEC3 parameters";
          if (!params_) params_ = d.params;
          nsec3_.push_back({HashedLabel{rr.owner.labels().front()}, &d});
          families_.insert(DenialFamily::Nsec3);
        }
      }
    }
  }

  const std::vector<RRSet>& sets() const { return sets_; }
  const std::set<DenialFamily>& families() const { return families_; }
  const std::string& error() const { return error_; }

  std::optional<TypeBitmap> match(const DomainName& n) const {
    for (const auto& e : nsec_) {
      if (e.owner == n) return e.data->types;
    }
    if (!nsec3_.empty()) {
      const HashedLabel h = hash(n);
      for (const auto& e : nsec3_) {
        if (e.owner == h) return e.data->types;
      }
    }
    return std::nullopt;
  }

  bool nsec_cover(const DomainName& n) const { return nsec_covering(n) != nullptr; }

  const NsecEntry* nsec_covering(const DomainName& n) const {
    for (const auto& e : nsec_) {
      if (nsec_covers(e.owner, e.data->next, n)) return &e;
    }
    return nullptr;
  }

  bool nsec3_cover(const DomainName& n) const {
    if (nsec3_.empty()) return false;
    const HashedLabel h = hash(n);
    return std::any_of(nsec3_.begin(), nsec3_.end(), [&](const Nsec3Entry& e) {
      return nsec3_covers(e.owner, e.data->next_hashed, h);
    });
  }

  /// NSEC: covers `q`. NSEC3: covers the next closer name below `ce`.
  bool covers_query(const DomainName& q, const DomainName& ce) const {
    if (nsec_cover(q)) return true;
    if (!q.is_strict_subdomain_of(ce)) return false;
    return nsec3_cover(q.suffix(ce.label_count() + 1));
  }

  bool covers(const DomainName& n) const { return nsec_cover(n) || nsec3_cover(n); }

  bool nsec_ent(const DomainName& q) const {
    const NsecEntry* e = nsec_covering(q);
    return e && e->data->next.is_strict_subdomain_of(q);
  }

  /// Deepest closest encloser either family supports; the apex otherwise.
  DomainName closest_encloser(const DomainName& q) const {
    DomainName best = apex_;
    if (const NsecEntry* e = nsec_covering(q)) {
      for (const DomainName& side : {e->owner, e->data->next}) {
        DomainName c = common_ancestor(q, side);
        if (c.is_subdomain_of(apex_) && c.label_count() > best.label_count()) best = c;
      }
    }
    if (!nsec3_.empty()) {
      for (DomainName a = q; a.is_strict_subdomain_of(apex_);) {
        a = a.parent();
        if (a.label_count() <= best.label_count()) break;
        if (match(a)) {
          best = a;
          break;
        }
      }
    }
    return best;
  }

  std::vector<DenialLink> links() const {
    std::vector<DenialLink> out;
    for (const auto& e : nsec_) out.push_back({DenialFamily::Nsec, e.owner, e.data->next.to_string()});
    for (const auto& e : nsec3_) {
      out.push_back({DenialFamily::Nsec3, apex_.child(e.owner.value), e.data->next_hashed.value});
    }
    return out;
  }

 private:
  HashedLabel hash(const DomainName& n) const { return cfg_.hasher(n, *params_); }

  DomainName apex_;
  const ResolverConfig& cfg_;
  std::vector<ResourceRecord> records_;
  std::vector<RRSet> sets_;
  std::vector<NsecEntry> nsec_;
  std::vector<Nsec3Entry> nsec3_;
  std::optional<Nsec3Params> params_;
  std::set<DenialFamily> families_;
  std::string error_;
};

/// Validates every proof RRset; returns the weakest state and a reason.
std::pair<SecurityState, std::string> check_proof_sets(const ProofIndex& idx,
                                                       const ZoneKeys& keys,
                                                       const ResolverConfig& cfg,
                                                       std::vector<RRsetVerdict>* verdicts) {
  SecurityState state = SecurityState::Secure;
  std::string reason;
  for (const auto& set : idx.sets()) {
    RRsetVerdict v = validate_rrset(set, keys, cfg);
    if (v.state == SecurityState::Secure) {
      const auto& f = v.rrsig->as<RrsigData>();
      if (!set.owner.is_subdomain_of(keys.apex) ||
          static_cast<std::size_t>(f.labels) != set.owner.signature_label_count()) {
        v.state = SecurityState::Bogus;
        v.reason = "denial record label count";
      }
    }
    if (v.state < state) {
      state = v.state;
      reason = v.reason;
    }
    if (verdicts) verdicts->push_back(std::move(v));
  }
  return {state, reason};
}

}  // namespace

DenialResult validate_denial(const Query& q, const std::vector<ResourceRecord>& proof,
                             const ZoneKeys& keys, const ResolverConfig& cfg) {
  DenialResult out;
  const ProofIndex idx(proof, keys, cfg);
  out.families = idx.families();
  out.links = idx.links();
  out.proof_sets = idx.sets();

  auto invalid = [&](std::string reason) {
    out.kind = DenialKind::Invalid;
    out.state = std::min(out.state, SecurityState::Bogus);
    out.reason = std::move(reason);
    return out;
  };

  if (idx.sets().empty()) return invalid("no denial records");
  auto [state, reason] = check_proof_sets(idx, keys, cfg, &out.verdicts);
  out.state = state;
  if (state == SecurityState::Bogus) return invalid(reason);
  if (!idx.error().empty()) return invalid(idx.error());
  if (out.families.size() > 1 && cfg.mixed_denial_policy == MixedDenialPolicy::Servfail) {
    return invalid("mixed denial families");
  }
  if (!q.qname.is_subdomain_of(keys.apex)) return invalid("query outside the signer's zone");

  if (auto types = idx.match(q.qname)) {
    if (types->contains(q.qtype)) return invalid("type exists");
    out.kind = DenialKind::ProvenNoData;
    return out;
  }
  if (idx.nsec_ent(q.qname)) {
    out.kind = DenialKind::ProvenNoData;
    return out;
  }

  const DomainName ce = idx.closest_encloser(q.qname);
  if (!idx.covers_query(q.qname, ce)) return invalid("query name not covered");
  const DomainName wildcard = ce.wildcard_child();
  if (auto wtypes = idx.match(wildcard)) {
    if (wtypes->contains(q.qtype)) return invalid("wildcard would match");
    out.kind = DenialKind::ProvenNoData;
    return out;
  }
  if (!idx.covers(wildcard)) return invalid("wildcard not covered");
  out.kind = DenialKind::ProvenNonexistent;
  return out;
}

bool proves_no_exact_match(const Query& q, const DomainName& ce,
                           const std::vector<ResourceRecord>& proof, const ZoneKeys& keys,
                           const ResolverConfig& cfg) {
  const ProofIndex idx(proof, keys, cfg);
  if (idx.sets().empty() || !idx.error().empty()) return false;
  if (check_proof_sets(idx, keys, cfg, nullptr).first != SecurityState::Secure) return false;
  return idx.covers_query(q.qname, ce);
}

AnswerVerdict validate_answer(const Query& q, const Response& r, const ZoneKeys& keys,
                              const ResolverConfig& cfg) {
  AnswerVerdict out;
  if (r.rcode == Rcode::ServFail || r.rcode == Rcode::Refused) {
    out.reason = "server failure";
    return out;
  }
  if (keys.state != SecurityState::Secure) {
    out.state = keys.state;
    out.reason = keys.reason;
    return out;
  }

  auto accept = [&](const RRSet& set, const RRsetVerdict& v) {
    if (v.state == SecurityState::Secure && v.key) {
      out.accepted.push_back({keys.apex, set, *v.key, v.message_digest, v.state});
    }
  };

  out.state = SecurityState::Secure;
  if (!r.answer.empty()) {
    if (r.rcode != Rcode::NoError) {
      out.state = SecurityState::Bogus;
      out.reason = "answer with error rcode";
      return out;
    }
    for (const auto& set : group_rrsets(r.answer)) {
      if (set.owner != q.qname || set.type != q.qtype) {
        out.state = SecurityState::Bogus;
        out.reason = "unexpected answer record";
        return out;
      }
      const RRsetVerdict v = validate_rrset(set, keys, cfg);
      if (v.state < out.state) {
        out.state = v.state;
        out.reason = v.reason;
      }
      if (v.state != SecurityState::Secure) continue;
      const auto labels = static_cast<std::size_t>(v.rrsig->as<RrsigData>().labels);
      if (labels < q.qname.signature_label_count()) {
        if (!proves_no_exact_match(q, q.qname.suffix(labels), r.authority, keys, cfg)) {
          out.state = SecurityState::Bogus;
          out.reason = "wildcard answer without denial";
          return out;
        }
        const ProofIndex idx(r.authority, keys, cfg);
        std::vector<RRsetVerdict> vs;
        check_proof_sets(idx, keys, cfg, &vs);
        for (std::size_t i = 0; i < vs.size(); ++i) accept(idx.sets()[i], vs[i]);
      }
      accept(set, v);
    }
    return out;
  }

  DenialResult d = validate_denial(q, r.authority, keys, cfg);
  const DenialKind expected =
      r.rcode == Rcode::NxDomain ? DenialKind::ProvenNonexistent : DenialKind::ProvenNoData;
  if (d.kind != expected) {
    out.state = SecurityState::Bogus;
    out.reason = d.kind == DenialKind::Invalid ? d.reason : "denial does not match rcode";
  } else {
    out.state = d.state;
    out.reason = d.reason;
    for (std::size_t i = 0; i < d.verdicts.size(); ++i) accept(d.proof_sets[i], d.verdicts[i]);
  }
  out.denial = std::move(d);
  return out;
}

}  // namespace dnssec
