#include "dnssec/zone.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "dnssec/errors.hpp"

namespace dnssec {

const char* to_string(DenialFamily f) { return f == DenialFamily::Nsec ? "NSEC" : "NSEC3"; }

// ---------------------------------------------------------------- Zone

Zone::Zone(DomainName apex, Nsec3Hasher hasher) : apex_(std::move(apex)), hasher_(std::move(hasher)) {}

void Zone::add(ResourceRecord rr) {
  if (!rr.owner.is_subdomain_of(apex_)) {
    throw OutOfZone(rr.owner.to_string() + " is outside zone " + apex_.to_string());
  }
  const RecordType covered = rr.covered_type();
  if (covered == RecordType::NSEC3) {
    // The owner is either "<hash>.<apex>" or, as a transcription
    // convenience, the unhashed name.
    if (auto* d = std::get_if<Nsec3Data>(&rr.rdata); d && !params_) params_ = d->params;
    HashedLabel h;
    const std::string& first = rr.owner.is_root() ? std::string() : rr.owner.labels().front();
    const bool hashed_form = rr.owner.parent() == apex_ && first.size() == 32 &&
                             std::all_of(first.begin(), first.end(), [](unsigned char c) {
                               return std::isdigit(c) || (c >= 'a' && c <= 'v');
                             });
    if (hashed_form) {
      h = HashedLabel{first};
    } else {
      h = hash(rr.owner);
      hashed_names_[h] = rr.owner;
      rr.owner = apex_.child(h.value);
    }
    auto& set = nsec3_[h];
    set.owner = rr.owner;
    set.type = RecordType::NSEC3;
    (rr.type() == RecordType::RRSIG ? set.rrsigs : set.records).push_back(std::move(rr));
    return;
  }
  auto& set = rrsets_[RRKey{rr.owner, covered}];
  set.owner = rr.owner;
  set.type = covered;
  (rr.type() == RecordType::RRSIG ? set.rrsigs : set.records).push_back(std::move(rr));
}

void Zone::remove(const DomainName& owner, RecordType type) { rrsets_.erase(RRKey{owner, type}); }

void Zone::remove_type(RecordType type) {
  if (type == RecordType::NSEC3) {
    nsec3_.clear();
    hashed_names_.clear();
    return;
  }
  if (type == RecordType::RRSIG) {
    for (auto& [key, set] : rrsets_) set.rrsigs.clear();
    for (auto& [key, set] : nsec3_) set.rrsigs.clear();
    std::erase_if(rrsets_, [](const auto& kv) { return kv.second.records.empty(); });
    return;
  }
  std::erase_if(rrsets_, [type](const auto& kv) { return kv.first.type == type; });
}

const RRSet* Zone::find(const DomainName& owner, RecordType type) const {
  auto it = rrsets_.find(RRKey{owner, type});
  return it == rrsets_.end() || it->second.records.empty() ? nullptr : &it->second;
}

TypeBitmap Zone::types_at(const DomainName& owner) const {
  TypeBitmap out;
  for (auto it = rrsets_.lower_bound(RRKey{owner, RecordType::A});
       it != rrsets_.end() && it->first.owner == owner; ++it) {
    if (!it->second.records.empty()) out.insert(it->first.type);
  }
  return out;
}

NameSet Zone::owners() const {
  NameSet out;
  for (const auto& [key, set] : rrsets_) {
    if (!set.records.empty()) out.insert(key.owner);
  }
  return out;
}

NameSet Zone::delegations() const {
  NameSet out;
  for (const auto& [key, set] : rrsets_) {
    if (key.type == RecordType::NS && key.owner != apex_ && !set.records.empty()) {
      out.insert(key.owner);
    }
  }
  return out;
}

std::optional<DomainName> Zone::delegation_for(const DomainName& name) const {
  std::optional<DomainName> best;
  for (const auto& d : delegations()) {
    if (name.is_subdomain_of(d) && (!best || d.label_count() < best->label_count())) best = d;
  }
  return best;
}

NameSet Zone::authoritative_names() const {
  const NameSet cuts = delegations();
  NameSet out;
  for (const auto& owner : owners()) {
    bool below_cut = std::any_of(cuts.begin(), cuts.end(), [&](const DomainName& d) {
      return owner.is_strict_subdomain_of(d);
    });
    if (!below_cut) out.insert(owner);
  }
  return out;
}

NameSet Zone::empty_non_terminals() const {
  const NameSet names = authoritative_names();
  NameSet out;
  for (const auto& n : names) {
    for (DomainName p = n.parent(); p.is_strict_subdomain_of(apex_); p = p.parent()) {
      if (!names.contains(p)) out.insert(p);
    }
  }
  return out;
}

NameSet Zone::existing_names() const {
  NameSet out = authoritative_names();
  out.merge(empty_non_terminals());
  return out;
}

std::optional<DenialFamily> Zone::family_of(const DomainName& name) const {
  switch (mode_) {
    case ChainMode::None: return std::nullopt;
    case ChainMode::NsecOnly: return DenialFamily::Nsec;
    case ChainMode::Nsec3Only: return DenialFamily::Nsec3;
    case ChainMode::Mixed: {
      auto it = assignment_.find(name);
      if (it == assignment_.end()) return std::nullopt;
      return it->second;
    }
  }
  return std::nullopt;
}

HashedLabel Zone::hash(const DomainName& name) const {
  return hasher_(name, params_.value_or(Nsec3Params{}));
}

void Zone::set_chain(ChainMode mode, ChainAssignment assignment, std::optional<Nsec3Params> params) {
  mode_ = mode;
  assignment_ = std::move(assignment);
  params_ = std::move(params);
}

// ---------------------------------------------------------------- parsing

namespace {

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

bool is_number(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

int parse_int(const std::string& s, const char* what) {
  if (!is_number(s)) throw ParseError(std::string("expected numeric ") + what + ", got '" + s + "'");
  return std::stoi(s);
}

std::uint16_t parse_tag(const std::string& s) {
  // Key tags in the transcribed listings are placeholders; they carry no
  // meaning in the model and a symbolic token reads as 0.
  return is_number(s) ? static_cast<std::uint16_t>(std::stoul(s)) : 0;
}

Nsec3Params parse_params(const std::string& s) {
  const auto first = s.find(':');
  const auto second = first == std::string::npos ? first : s.find(':', first + 1);
  if (second == std::string::npos) throw ParseError("NSEC3 parameters must be ALG:ITER:SALT");
  Nsec3Params p;
  p.algorithm = parse_int(s.substr(0, first), "NSEC3 algorithm");
  p.iterations = parse_int(s.substr(first + 1, second - first - 1), "NSEC3 iterations");
  p.salt_hex = s.substr(second + 1);
  if (p.salt_hex == "-") p.salt_hex.clear();
  return p;
}

TypeBitmap parse_types(const std::vector<std::string>& toks, std::size_t from) {
  TypeBitmap out;
  for (std::size_t i = from; i < toks.size(); ++i) out.insert(parse_record_type(toks[i]));
  return out;
}

void expect_count(const std::vector<std::string>& rdata, std::size_t n, RecordType t) {
  if (rdata.size() != n) {
    throw ParseError(std::string(to_string(t)) + " rdata needs " + std::to_string(n) +
                     " fields, got " + std::to_string(rdata.size()));
  }
}

bool looks_hashed(const std::string& s) {
  return s.size() == 32 && std::all_of(s.begin(), s.end(), [](unsigned char c) {
           return std::isdigit(c) || (c >= 'a' && c <= 'v');
         });
}

struct PendingRecord {
  std::size_t line;
  DomainName owner;
  RecordType type;
  std::vector<std::string> rdata;
};

Rdata parse_rdata(RecordType type, const std::vector<std::string>& rd, const Zone& z) {
  switch (type) {
    case RecordType::A:
      expect_count(rd, 1, type);
      return AData{rd[0]};
    case RecordType::NS:
      expect_count(rd, 1, type);
      return NsData{parse_name(rd[0])};
    case RecordType::MX:
      if (rd.size() == 2 && is_number(rd[0])) return MxData{parse_name(rd[1])};
      expect_count(rd, 1, type);
      return MxData{parse_name(rd[0])};
    case RecordType::DNSKEY:
      expect_count(rd, 4, type);
      return DnskeyData{static_cast<std::uint16_t>(parse_int(rd[0], "DNSKEY flags")),
                        AlgorithmId{parse_int(rd[2], "algorithm")},
                        PublicKey{Term::atom(rd[3])}};
    case RecordType::DS:
      expect_count(rd, 4, type);
      return DsData{parse_tag(rd[0]), AlgorithmId{parse_int(rd[1], "algorithm")},
                    parse_int(rd[2], "digest type"), Digest{Term::atom(rd[3])}};
    case RecordType::RRSIG:
      expect_count(rd, 4, type);
      return RrsigData{parse_record_type(rd[0]), AlgorithmId{parse_int(rd[1], "algorithm")},
                       parse_int(rd[2], "label count"), 0, parse_name(rd[3]), std::nullopt};
    case RecordType::NSEC:
      if (rd.empty()) throw ParseError("NSEC rdata needs a next name");
      return NsecData{parse_name(rd[0]), parse_types(rd, 1)};
    case RecordType::NSEC3: {
      if (rd.size() < 2) throw ParseError("NSEC3 rdata needs parameters and a next hash");
      Nsec3Params params = parse_params(rd[0]);
      HashedLabel next;
      if (looks_hashed(rd[1])) {
        next = HashedLabel{rd[1]};
      } else {
        next = z.hasher()(parse_name(rd[1]), params);
      }
      return Nsec3Data{params, next, parse_types(rd, 2)};
    }
  }
  throw ParseError("unsupported record type");
}

}  // namespace

Zone load_zone(std::string_view zone_text) {
  std::optional<DomainName> origin;
  std::vector<PendingRecord> pending;
  std::optional<DomainName> last_owner;

  std::size_t line_no = 0;
  std::istringstream in{std::string(zone_text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto c = line.find("//"); c != std::string::npos) line.erase(c);
    auto toks = split_ws(line);
    if (toks.empty()) continue;
    try {
      if (toks[0] == "$ORIGIN") {
        if (toks.size() != 2) throw ParseError("$ORIGIN takes one name");
        origin = parse_name(toks[1]);
        continue;
      }
      const bool continuation = std::isspace(static_cast<unsigned char>(line[0])) != 0;
      DomainName owner;
      std::size_t type_at = 0;
      if (continuation) {
        if (!last_owner) throw ParseError("continuation line without a previous owner");
        owner = *last_owner;
      } else {
        owner = parse_name(toks[0]);
        type_at = 1;
      }
      if (type_at >= toks.size()) throw ParseError("missing record type");
      const RecordType type = parse_record_type(toks[type_at]);
      last_owner = owner;
      pending.push_back(PendingRecord{line_no, owner, type,
                                      std::vector<std::string>(toks.begin() + static_cast<std::ptrdiff_t>(type_at) + 1, toks.end())});
    } catch (const ParseError& e) {
      throw ZoneParseError(line_no, e.what());
    }
  }
  if (pending.empty()) throw ZoneParseError(line_no, "zone contains no records");

  DomainName apex;
  if (origin) {
    apex = *origin;
  } else {
    apex = pending.front().owner;
    for (const auto& p : pending) apex = common_ancestor(apex, p.owner);
  }

  Zone z(apex);
  for (const auto& p : pending) {
    try {
      z.add(ResourceRecord{p.owner, parse_rdata(p.type, p.rdata, z)});
    } catch (const OutOfZone& e) {
      throw ZoneParseError(p.line, e.what());
    } catch (const ParseError& e) {
      throw ZoneParseError(p.line, e.what());
    }
  }
  bool has_nsec = false;
  for (const auto& [key, set] : z.rrsets()) has_nsec |= key.type == RecordType::NSEC;
  const bool has_nsec3 = !z.nsec3_rrsets().empty();
  if (has_nsec && has_nsec3) {
    ChainAssignment assignment;
    for (const auto& [key, set] : z.rrsets()) {
      if (key.type == RecordType::NSEC) assignment[key.owner] = DenialFamily::Nsec;
    }
    for (const auto& [h, name] : z.hashed_names()) assignment[name] = DenialFamily::Nsec3;
    z.set_chain(ChainMode::Mixed, std::move(assignment), z.nsec3_params());
  } else if (has_nsec) {
    z.set_chain(ChainMode::NsecOnly, {}, std::nullopt);
  } else if (has_nsec3) {
    z.set_chain(ChainMode::Nsec3Only, {}, z.nsec3_params());
  }
  return z;
}

Zone strip_dnssec(Zone z) {
  z.remove_type(RecordType::DNSKEY);
  z.remove_type(RecordType::NSEC);
  z.remove_type(RecordType::NSEC3);
  z.remove_type(RecordType::RRSIG);
  z.set_chain(ChainMode::None, {}, std::nullopt);
  return z;
}

// ---------------------------------------------------------------- chains

bool nsec_covers(const DomainName& owner, const DomainName& next, const DomainName& name) {
  if (owner < next) return owner < name && name < next;
  // Last record of the chain: everything after the owner is covered.
  return owner < name || name < next;
}

bool nsec3_covers(const HashedLabel& owner, const HashedLabel& next, const HashedLabel& h) {
  if (owner < next) return owner < h && h < next;
  return owner < h || h < next;
}

namespace {

TypeBitmap nsec_bitmap(const Zone& z, const DomainName& owner) {
  TypeBitmap types = z.types_at(owner);
  types.erase(RecordType::RRSIG);
  types.erase(RecordType::NSEC3);
  types.insert(RecordType::RRSIG);
  types.insert(RecordType::NSEC);
  if (owner == z.apex()) types.insert(RecordType::DNSKEY);
  return types;
}

TypeBitmap nsec3_bitmap(const Zone& z, const DomainName& owner) {
  TypeBitmap types = z.types_at(owner);
  types.erase(RecordType::RRSIG);
  types.erase(RecordType::NSEC);
  if (owner == z.apex()) types.insert(RecordType::DNSKEY);
  if (types.empty()) return types;  // empty non-terminal
  const bool unsigned_cut = owner != z.apex() && types == TypeBitmap{RecordType::NS};
  if (!unsigned_cut) types.insert(RecordType::RRSIG);
  return types;
}

Zone without_denial(Zone z) {
  z.remove_type(RecordType::NSEC);
  z.remove_type(RecordType::NSEC3);
  return z;
}

std::vector<std::pair<HashedLabel, DomainName>> hash_order(const Zone& z, const NameSet& names) {
  std::vector<std::pair<HashedLabel, DomainName>> out;
  for (const auto& n : names) out.emplace_back(z.hash(n), n);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

Zone build_nsec_chain(Zone z) {
  z = without_denial(std::move(z));
  const NameSet names = z.authoritative_names();
  const std::vector<DomainName> order(names.begin(), names.end());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const DomainName& next = order[(i + 1) % order.size()];
    z.add(ResourceRecord{order[i], NsecData{next, nsec_bitmap(z, order[i])}});
  }
  z.set_chain(ChainMode::NsecOnly, {}, std::nullopt);
  return z;
}

Zone build_nsec3_chain(Zone z, const Nsec3Params& params) {
  z = without_denial(std::move(z));
  z.set_chain(ChainMode::Nsec3Only, {}, params);
  const auto order = hash_order(z, z.existing_names());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& [h, name] = order[i];
    z.add(ResourceRecord{name, Nsec3Data{params, order[(i + 1) % order.size()].first,
                                         nsec3_bitmap(z, name)}});
  }
  return z;
}

Zone build_mixed_chain(Zone z, const ChainAssignment& assignment, const Nsec3Params& params) {
  z = without_denial(std::move(z));
  const NameSet names = z.authoritative_names();
  for (const auto& n : names) {
    if (!assignment.contains(n)) {
      throw Error("mixed chain assignment does not cover " + n.to_string());
    }
  }
  z.set_chain(ChainMode::Mixed, assignment, params);

  const std::vector<DomainName> canonical(names.begin(), names.end());
  for (std::size_t i = 0; i < canonical.size(); ++i) {
    if (assignment.at(canonical[i]) != DenialFamily::Nsec) continue;
    z.add(ResourceRecord{canonical[i], NsecData{canonical[(i + 1) % canonical.size()],
                                                nsec_bitmap(z, canonical[i])}});
  }
  const auto hashed = hash_order(z, names);
  for (std::size_t i = 0; i < hashed.size(); ++i) {
    const auto& [h, name] = hashed[i];
    if (assignment.at(name) != DenialFamily::Nsec3) continue;
    z.add(ResourceRecord{name, Nsec3Data{params, hashed[(i + 1) % hashed.size()].first,
                                         nsec3_bitmap(z, name)}});
  }
  return z;
}

// ---------------------------------------------------------------- signing

SignedZone::SignedZone(Zone zone, std::vector<KeyPair> keys, SignLog log)
    : zone_(std::move(zone)), keys_(std::move(keys)), log_(std::move(log)) {}

std::vector<const KeyPair*> SignedZone::keys_with_role(KeyRole role) const {
  std::vector<const KeyPair*> out;
  for (const auto& k : keys_) {
    if (k.role() == role) out.push_back(&k);
  }
  return out;
}

ResourceRecord make_rrsig(const std::vector<ResourceRecord>& records, const KeyPair& key,
                          const DomainName& signer, SignLog* log) {
  const DomainName& owner = records.front().owner;
  const RecordType type = records.front().type();
  RrsigData fields{type, key.algorithm(), static_cast<int>(owner.signature_label_count()),
                   key.key_tag(), signer, std::nullopt};
  fields.signature = sign(signing_input(fields, owner, type, records), key, log);
  return ResourceRecord{owner, std::move(fields)};
}

SignedZone sign_zone(Zone z, std::vector<KeyPair> keys) {
  SignLog log;
  z.remove_type(RecordType::RRSIG);
  z.remove(z.apex(), RecordType::DNSKEY);
  for (const auto& k : keys) {
    z.add(ResourceRecord{z.apex(), DnskeyData{k.role() == KeyRole::Ksk ? kSepKeyFlags : kZoneKeyFlags,
                                              k.algorithm(), k.public_key()}});
  }

  const NameSet cuts = z.delegations();
  auto sign_set = [&](RRSet& set) {
    const bool cut_ns = set.type == RecordType::NS && cuts.contains(set.owner);
    const bool glue = std::any_of(cuts.begin(), cuts.end(), [&](const DomainName& d) {
      return set.owner.is_strict_subdomain_of(d);
    });
    if (cut_ns || glue || set.records.empty()) return;
    for (const auto& k : keys) {
      const bool use = k.role() == KeyRole::Zsk || set.type == RecordType::DNSKEY;
      if (use) set.rrsigs.push_back(make_rrsig(set.records, k, z.apex(), &log));
    }
  };
  for (auto& [key, set] : z.rrsets()) sign_set(set);
  for (auto& [key, set] : z.nsec3_rrsets()) sign_set(set);
  return SignedZone(std::move(z), std::move(keys), std::move(log));
}

SignedZone sign_zone(Zone z, const KeyPair& zsk, const KeyPair& ksk) {
  if (zsk.role() != KeyRole::Zsk || ksk.role() != KeyRole::Ksk) {
    throw Error("sign_zone expects a ZSK and a KSK");
  }
  return sign_zone(std::move(z), std::vector<KeyPair>{zsk, ksk});
}

Digest dnskey_digest(const DomainName& owner, const DnskeyData& key) {
  return hash(Term::tuple({Term::name(owner), Term::atom("DNSKEY"),
                           Term::atom(std::to_string(key.flags)),
                           Term::atom(std::to_string(key.algorithm.code)), key.key.term}));
}

std::vector<ResourceRecord> ds_for(const SignedZone& child) {
  std::vector<ResourceRecord> out;
  for (const KeyPair* k : child.keys_with_role(KeyRole::Ksk)) {
    DnskeyData data{kSepKeyFlags, k->algorithm(), k->public_key()};
    out.push_back(ResourceRecord{child.apex(), DsData{k->key_tag(), k->algorithm(), 1,
                                                      dnskey_digest(child.apex(), data)}});
  }
  if (out.empty()) throw Error("zone " + child.apex().to_string() + " has no KSK");
  return out;
}

void set_delegation_ds(Zone& parent, const DomainName& child, std::vector<ResourceRecord> ds) {
  parent.remove(child, RecordType::DS);
  for (auto& rr : ds) parent.add(std::move(rr));
}

// ---------------------------------------------------------------- answers

namespace {

class Responder {
 public:
  Responder(const SignedZone& sz, ServerMode mode) : sz_(sz), z_(sz.zone()), mode_(mode) {}

  Response answer(const Query& q) {
    if (!q.qname.is_subdomain_of(z_.apex())) return Response{Rcode::Refused, {}, {}, {}, false};

    if (auto cut = z_.delegation_for(q.qname)) {
      if (!(q.qname == *cut && q.qtype == RecordType::DS)) return referral(*cut);
    }

    const NameSet existing = z_.existing_names();
    if (existing.contains(q.qname)) {
      if (const RRSet* set = z_.find(q.qname, q.qtype)) {
        Response r;
        append(r.answer, *set);
        return r;
      }
      return nodata(q);
    }
    return nonexistent(q, existing);
  }

 private:
  static void append(std::vector<ResourceRecord>& section, const RRSet& set) {
    section.insert(section.end(), set.records.begin(), set.records.end());
    section.insert(section.end(), set.rrsigs.begin(), set.rrsigs.end());
  }

  void add_proof(std::vector<ResourceRecord>& section, const RRSet* set) {
    if (!set) return;
    for (const auto& rr : section) {
      if (rr == set->records.front()) return;
    }
    append(section, *set);
  }

  const RRSet* nsec_at(const DomainName& n) const { return z_.find(n, RecordType::NSEC); }

  const RRSet* nsec_covering(const DomainName& n) const {
    for (const auto& [key, set] : z_.rrsets()) {
      if (key.type != RecordType::NSEC || set.records.empty()) continue;
      if (nsec_covers(key.owner, set.records.front().as<NsecData>().next, n)) return &set;
    }
    return nullptr;
  }

  const RRSet* nsec3_matching(const DomainName& n) const {
    auto it = z_.nsec3_rrsets().find(z_.hash(n));
    return it == z_.nsec3_rrsets().end() || it->second.records.empty() ? nullptr : &it->second;
  }

  const RRSet* nsec3_covering(const DomainName& n) const {
    const HashedLabel h = z_.hash(n);
    for (const auto& [owner_hash, set] : z_.nsec3_rrsets()) {
      if (set.records.empty()) continue;
      if (nsec3_covers(owner_hash, set.records.front().as<Nsec3Data>().next_hashed, h)) return &set;
    }
    return nullptr;
  }

  /// Family used to deny `name`; in mixed zones that of its canonical
  /// predecessor among authoritative names.
  std::optional<DenialFamily> family_for_gap(const DomainName& name) const {
    if (z_.chain_mode() != ChainMode::Mixed) return z_.family_of(name);
    const NameSet names = z_.authoritative_names();
    auto it = names.lower_bound(name);
    if (it != names.end() && *it == name) return z_.family_of(name);
    if (it == names.begin()) return z_.family_of(z_.apex());
    return z_.family_of(*std::prev(it));
  }

  Response referral(const DomainName& cut) {
    Response r;
    append(r.authority, *z_.find(cut, RecordType::NS));
    if (const RRSet* ds = z_.find(cut, RecordType::DS)) {
      append(r.authority, *ds);
    } else if (z_.family_of(cut) == DenialFamily::Nsec3) {
      add_proof(r.authority, nsec3_matching(cut));
    } else {
      add_proof(r.authority, nsec_at(cut));
    }
    for (const auto& ns : z_.find(cut, RecordType::NS)->records) {
      const DomainName& target = ns.as<NsData>().target;
      if (!target.is_subdomain_of(z_.apex())) continue;
      if (const RRSet* glue = z_.find(target, RecordType::A)) {
        r.additional.insert(r.additional.end(), glue->records.begin(), glue->records.end());
      }
    }
    return r;
  }

  Response nodata(const Query& q) {
    Response r;
    const auto family = family_for_gap(q.qname);
    if (family == DenialFamily::Nsec3) {
      add_proof(r.authority, nsec3_matching(q.qname));
    } else if (family == DenialFamily::Nsec) {
      // Empty non-terminals own no NSEC; the covering record proves them.
      const RRSet* own = nsec_at(q.qname);
      add_proof(r.authority, own ? own : nsec_covering(q.qname));
    }
    return r;
  }

  Response nonexistent(const Query& q, const NameSet& existing) {
    const DomainName ce = closest_encloser(existing, q.qname);
    const DomainName next_closer = q.qname.suffix(ce.label_count() + 1);
    const DomainName wildcard = ce.wildcard_child();
    auto family = family_for_gap(q.qname);

    if (z_.chain_mode() == ChainMode::Mixed && family == DenialFamily::Nsec3 &&
        mode_ == ServerMode::Honest && nsec_covering(q.qname)) {
      family = DenialFamily::Nsec;
    }
    if (z_.chain_mode() == ChainMode::Mixed && family == DenialFamily::Nsec3 &&
        mode_ == ServerMode::Honest) {
      // No consistent proof exists for this gap.
      return Response{Rcode::ServFail, {}, {}, {}, false};
    }

    Response r;
    if (existing.contains(wildcard)) {
      if (const RRSet* source = z_.find(wildcard, q.qtype)) {
        for (const auto& rr : source->records) r.answer.push_back(ResourceRecord{q.qname, rr.rdata});
        for (const auto& rr : source->rrsigs) r.answer.push_back(ResourceRecord{q.qname, rr.rdata});
        if (family == DenialFamily::Nsec3) {
          add_proof(r.authority, nsec3_covering(next_closer));
        } else if (family == DenialFamily::Nsec) {
          add_proof(r.authority, nsec_covering(q.qname));
        }
        return r;
      }
      if (family == DenialFamily::Nsec3) {
        add_proof(r.authority, nsec3_matching(ce));
        add_proof(r.authority, nsec3_covering(next_closer));
        add_proof(r.authority, nsec3_matching(wildcard));
      } else if (family == DenialFamily::Nsec) {
        add_proof(r.authority, nsec_covering(q.qname));
        add_proof(r.authority, nsec_at(wildcard));
      }
      return r;
    }

    r.rcode = Rcode::NxDomain;
    if (family == DenialFamily::Nsec3) {
      add_proof(r.authority, nsec3_matching(ce));
      add_proof(r.authority, nsec3_covering(next_closer));
      add_proof(r.authority, nsec3_covering(wildcard));
    } else if (family == DenialFamily::Nsec) {
      add_proof(r.authority, nsec_covering(q.qname));
      add_proof(r.authority, nsec_covering(wildcard));
    }
    return r;
  }

  const SignedZone& sz_;
  const Zone& z_;
  ServerMode mode_;
};

}  // namespace

Response answer_query(const SignedZone& zone, const Query& q, ServerMode mode) {
  return Responder(zone, mode).answer(q);
}

}  // namespace dnssec
