#include "dnssec/record.hpp"

#include <algorithm>
#include <map>

#include "dnssec/errors.hpp"

namespace dnssec {

namespace {

template <class... F>
struct overloaded : F... {
  using F::operator()...;
};
template <class... F>
overloaded(F...) -> overloaded<F...>;

std::string alg_text(AlgorithmId a) { return std::to_string(a.code); }

std::string signature_text(const std::optional<Signature>& s) {
  return s ? s->term.to_string() : "-";
}

}  // namespace

const char* to_string(RecordType t) {
  switch (t) {
    case RecordType::A: return "A";
    case RecordType::NS: return "NS";
    case RecordType::MX: return "MX";
    case RecordType::DNSKEY: return "DNSKEY";
    case RecordType::DS: return "DS";
    case RecordType::RRSIG: return "RRSIG";
    case RecordType::NSEC: return "NSEC";
    case RecordType::NSEC3: return "NSEC3";
  }
  return "?";
}

RecordType parse_record_type(std::string_view text) {
  std::string upper(text);
  for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (RecordType t : kAllRecordTypes) {
    if (upper == to_string(t)) return t;
  }
  throw ParseError("unknown record type '" + std::string(text) + "'");
}

std::string to_string(const TypeBitmap& types) {
  std::string out;
  for (RecordType t : types) {
    if (!out.empty()) out += ' ';
    out += to_string(t);
  }
  return out;
}

const char* to_string(Rcode r) {
  switch (r) {
    case Rcode::NoError: return "NOERROR";
    case Rcode::NxDomain: return "NXDOMAIN";
    case Rcode::ServFail: return "SERVFAIL";
    case Rcode::Refused: return "REFUSED";
  }
  return "?";
}

RecordType ResourceRecord::covered_type() const {
  if (auto* sig = std::get_if<RrsigData>(&rdata)) return sig->type_covered;
  return type();
}

std::string rdata_text(const Rdata& rdata) {
  return std::visit(
      overloaded{
          [](const AData& d) { return d.address; },
          [](const NsData& d) { return d.target.to_string(); },
          [](const MxData& d) { return d.exchange.to_string(); },
          [](const DnskeyData& d) {
            return std::to_string(d.flags) + " 3 " + alg_text(d.algorithm) + " " +
                   d.key.term.to_string();
          },
          [](const DsData& d) {
            return std::to_string(d.key_tag) + " " + alg_text(d.algorithm) + " " +
                   std::to_string(d.digest_type) + " " + d.digest.term.to_string();
          },
          [](const RrsigData& d) {
            return std::string(to_string(d.type_covered)) + " " + alg_text(d.algorithm) + " " +
                   std::to_string(d.labels) + " " + std::to_string(d.key_tag) + " " +
                   d.signer.to_string() + " " + signature_text(d.signature);
          },
          [](const NsecData& d) { return d.next.to_string() + " " + to_string(d.types); },
          [](const Nsec3Data& d) {
            return d.params.to_string() + " " + d.next_hashed.value + " " + to_string(d.types);
          },
      },
      rdata);
}

std::string to_string(const ResourceRecord& rr) {
  return rr.owner.to_string() + " " + to_string(rr.type()) + " " + rdata_text(rr.rdata);
}

std::string fingerprint(const ResourceRecord& rr) { return short_digest(to_string(rr)); }

std::vector<RRSet> group_rrsets(const std::vector<ResourceRecord>& section) {
  std::vector<RRSet> sets;
  auto find = [&](const DomainName& owner, RecordType type) -> RRSet& {
    for (auto& s : sets) {
      if (s.type == type && s.owner == owner) return s;
    }
    sets.push_back(RRSet{owner, type, {}, {}});
    return sets.back();
  };
  for (const auto& rr : section) {
    if (rr.type() == RecordType::RRSIG) {
      find(rr.owner, rr.covered_type()).rrsigs.push_back(rr);
    } else {
      find(rr.owner, rr.type()).records.push_back(rr);
    }
  }
  return sets;
}

std::string signing_input(const RrsigData& fields, const DomainName& owner, RecordType type,
                          const std::vector<ResourceRecord>& records) {
  DomainName signed_owner = owner;
  if (fields.labels >= 0 && static_cast<std::size_t>(fields.labels) < owner.signature_label_count()) {
    signed_owner = owner.suffix(static_cast<std::size_t>(fields.labels)).wildcard_child();
  }
  std::string out = "RRSIG " + std::string(to_string(fields.type_covered)) + " " +
                    alg_text(fields.algorithm) + " " + std::to_string(fields.labels) + " " +
                    std::to_string(fields.key_tag) + " " + fields.signer.to_string() + "\n";
  std::vector<std::string> lines;
  lines.reserve(records.size());
  for (const auto& rr : records) {
    lines.push_back(signed_owner.to_string() + " " + to_string(type) + " " +
                    (rr.owner == owner && rr.type() == type ? rdata_text(rr.rdata)
                                                            : "!" + to_string(rr)));
  }
  std::sort(lines.begin(), lines.end());
  for (const auto& l : lines) out += l + "\n";
  return out;
}

std::string to_string(const Response& r) {
  std::string out = std::string("rcode=") + to_string(r.rcode) + (r.ad ? " ad" : "") + "\n";
  auto section = [&](const char* name, const std::vector<ResourceRecord>& rrs) {
    for (const auto& rr : rrs) out += std::string(name) + ": " + to_string(rr) + "\n";
  };
  section("an", r.answer);
  section("ns", r.authority);
  section("ar", r.additional);
  return out;
}

Term record_term(const ResourceRecord& rr) {
  std::vector<Term> parts{Term::name(rr.owner), Term::atom(to_string(rr.type()))};
  auto atom = [](const std::string& s) { return Term::atom(s); };
  std::visit(overloaded{
                 [&](const AData& d) { parts.push_back(atom(d.address)); },
                 [&](const NsData& d) { parts.push_back(Term::name(d.target)); },
                 [&](const MxData& d) { parts.push_back(Term::name(d.exchange)); },
                 [&](const DnskeyData& d) {
                   parts.push_back(atom(std::to_string(d.flags)));
                   parts.push_back(atom("3"));
                   parts.push_back(atom(alg_text(d.algorithm)));
                   parts.push_back(d.key.term);
                 },
                 [&](const DsData& d) {
                   parts.push_back(atom(std::to_string(d.key_tag)));
                   parts.push_back(atom(alg_text(d.algorithm)));
                   parts.push_back(atom(std::to_string(d.digest_type)));
                   parts.push_back(d.digest.term);
                 },
                 [&](const RrsigData& d) {
                   parts.push_back(atom(to_string(d.type_covered)));
                   parts.push_back(atom(alg_text(d.algorithm)));
                   parts.push_back(atom(std::to_string(d.labels)));
                   parts.push_back(atom(std::to_string(d.key_tag)));
                   parts.push_back(Term::name(d.signer));
                   parts.push_back(d.signature ? d.signature->term : atom("NO_RRSIG"));
                 },
                 [&](const NsecData& d) {
                   parts.push_back(Term::name(d.next));
                   parts.push_back(atom(to_string(d.types)));
                 },
                 [&](const Nsec3Data& d) {
                   parts.push_back(atom(d.params.to_string()));
                   parts.push_back(atom(d.next_hashed.value));
                   parts.push_back(atom(to_string(d.types)));
                 },
             },
             rr.rdata);
  return Term::tuple(std::move(parts));
}

Term response_term(const Response& r) {
  auto section = [](const std::vector<ResourceRecord>& rrs) {
    std::vector<Term> ts;
    ts.reserve(rrs.size());
    for (const auto& rr : rrs) ts.push_back(record_term(rr));
    return Term::tuple(std::move(ts));
  };
  return Term::tuple({Term::atom(to_string(r.rcode)), section(r.answer), section(r.authority),
                      section(r.additional)});
}

}  // namespace dnssec
