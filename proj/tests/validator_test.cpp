#include <doctest.h>

#include "dnssec/errors.hpp"
#include "dnssec/validator.hpp"
#include "zone_support.hpp"

using namespace dnssec;
using testing::trusted_keys;

namespace {

Query query(const char* name, RecordType t) { return Query{parse_name(name), t, false, true, 1}; }

struct Case {
  const char* name;
  RecordType type;
  Rcode rcode;
  bool answered;
};

// Every outcome class of the example zone: exact, wildcard, NODATA at a
// name, at an empty non-terminal and at a wildcard, and name errors.
const Case kCases[] = {
    {"ai.example", RecordType::A, Rcode::NoError, true},
    {"xx.example", RecordType::A, Rcode::NoError, true},
    {"example", RecordType::MX, Rcode::NoError, true},
    {"example", RecordType::DNSKEY, Rcode::NoError, true},
    {"x.w.example", RecordType::MX, Rcode::NoError, true},
    {"z.w.example", RecordType::MX, Rcode::NoError, true},
    {"q.z.w.example", RecordType::MX, Rcode::NoError, true},
    {"a.example", RecordType::DS, Rcode::NoError, true},
    {"x.w.example", RecordType::A, Rcode::NoError, false},
    {"w.example", RecordType::MX, Rcode::NoError, false},
    {"y.w.example", RecordType::MX, Rcode::NoError, false},
    {"z.w.example", RecordType::A, Rcode::NoError, false},
    {"ai.example", RecordType::MX, Rcode::NoError, false},
    {"zz.example", RecordType::A, Rcode::NxDomain, false},
    {"aa.example", RecordType::A, Rcode::NxDomain, false},
    {"q.x.w.example", RecordType::MX, Rcode::NxDomain, false},
    {"q.ai.example", RecordType::A, Rcode::NxDomain, false},
};

}  // namespace

TEST_CASE("validate_rrsig distinguishes good, forged and unsupported signatures") {
  FreshSource fresh;
  const SignedZone sz = testing::signed_listing7(fresh);
  const ZoneKeys keys = trusted_keys(sz);
  REQUIRE(keys.state == SecurityState::Secure);
  const RRSet& mx = *sz.zone().find(parse_name("example"), RecordType::MX);
  REQUIRE(mx.rrsigs.size() == 1);
  const ResolverConfig cfg;

  const KeyPair& zsk = *sz.keys_with_role(KeyRole::Zsk).front();
  const KeyPair& ksk = *sz.keys_with_role(KeyRole::Ksk).front();
  const DnskeyData zsk_data{kZoneKeyFlags, zsk.algorithm(), zsk.public_key()};
  const DnskeyData ksk_data{kSepKeyFlags, ksk.algorithm(), ksk.public_key()};
  CHECK(validate_rrsig(mx, mx.rrsigs.front(), zsk_data, cfg) == RrsigResult::Ok);
  CHECK(validate_rrsig(mx, mx.rrsigs.front(), ksk_data, cfg) == RrsigResult::Bogus);

  RRSet changed = mx;
  changed.records.front().as<MxData>().exchange = parse_name("evil.example");
  CHECK(validate_rrsig(changed, mx.rrsigs.front(), zsk_data, cfg) == RrsigResult::Bogus);

  // The covered type is part of what is checked.
  RRSet retyped = mx;
  retyped.type = RecordType::NS;
  CHECK(validate_rrsig(retyped, mx.rrsigs.front(), zsk_data, cfg) == RrsigResult::Bogus);

  // A signature made by some other private key never verifies.
  FreshSource other;
  const KeyPair forger = generate_key(other, "adversary", KeyRole::Zsk, AlgorithmId{8});
  ResourceRecord forged = mx.rrsigs.front();
  auto& f = forged.as<RrsigData>();
  f.signature = sign_with(signing_input(f, mx.owner, mx.type, mx.records), forger.private_term(),
                          AlgorithmId{8});
  CHECK(validate_rrsig(mx, forged, zsk_data, cfg) == RrsigResult::Bogus);

  ResolverConfig only13;
  only13.supported_algorithms = {AlgorithmId{13}};
  CHECK(validate_rrsig(mx, mx.rrsigs.front(), zsk_data, only13) == RrsigResult::UnsupportedAlgorithm);
}

TEST_CASE("honest responses validate as Secure in NSEC and NSEC3 zones") {
  for (bool nsec3 : {false, true}) {
    CAPTURE(nsec3);
    FreshSource fresh;
    const SignedZone sz = testing::signed_listing7(fresh, nsec3);
    const ZoneKeys keys = trusted_keys(sz);
    for (const Case& c : kCases) {
      CAPTURE(c.name);
      CAPTURE(to_string(c.type));
      const Query q = query(c.name, c.type);
      const Response r = answer_query(sz, q);
      REQUIRE(r.rcode == c.rcode);
      CHECK(r.answer.empty() == !c.answered);
      const AnswerVerdict v = validate_answer(q, r, keys, ResolverConfig{});
      CHECK(v.state == SecurityState::Secure);
      CHECK(v.reason == "");
      CHECK(!v.accepted.empty());
      if (!c.answered) {
        REQUIRE(v.denial);
        CHECK(v.denial->families ==
              std::set<DenialFamily>{nsec3 ? DenialFamily::Nsec3 : DenialFamily::Nsec});
      }
    }
  }
}

TEST_CASE("tampered responses are Bogus") {
  for (bool nsec3 : {false, true}) {
    CAPTURE(nsec3);
    FreshSource fresh;
    const SignedZone sz = testing::signed_listing7(fresh, nsec3);
    const ZoneKeys keys = trusted_keys(sz);
    const ResolverConfig cfg;
    for (const Case& c : kCases) {
      CAPTURE(c.name);
      const Query q = query(c.name, c.type);
      const Response honest = answer_query(sz, q);

      // Flip the outcome class.
      Response flipped = honest;
      flipped.rcode = honest.rcode == Rcode::NxDomain ? Rcode::NoError : Rcode::NxDomain;
      if (!c.answered) CHECK(validate_answer(q, flipped, keys, cfg).state == SecurityState::Bogus);

      // Remove all signatures.
      Response unsigned_r = honest;
      std::erase_if(unsigned_r.answer, [](const ResourceRecord& rr) { return rr.type() == RecordType::RRSIG; });
      std::erase_if(unsigned_r.authority, [](const ResourceRecord& rr) { return rr.type() == RecordType::RRSIG; });
      CHECK(validate_answer(q, unsigned_r, keys, cfg).state == SecurityState::Bogus);

      // Drop the whole denial proof.
      if (!c.answered) {
        Response bare = honest;
        bare.authority.clear();
        CHECK(validate_answer(q, bare, keys, cfg).state == SecurityState::Bogus);
      } else {
        Response edited = honest;
        for (auto& rr : edited.answer) {
          if (rr.type() == RecordType::A) rr.as<AData>().address = "EVIL_ADDR";
          if (rr.type() == RecordType::MX) rr.as<MxData>().exchange = parse_name("evil.example");
          if (rr.type() == RecordType::DS) rr.as<DsData>().key_tag = 1;
          if (rr.type() == RecordType::DNSKEY) rr.as<DnskeyData>().flags = 1;
        }
        CHECK(validate_answer(q, edited, keys, cfg).state == SecurityState::Bogus);
      }
    }
  }
}

TEST_CASE("a wildcard answer without its denial proof is Bogus") {
  FreshSource fresh;
  const SignedZone sz = testing::signed_listing7(fresh);
  const Query q = query("z.w.example", RecordType::MX);
  Response r = answer_query(sz, q);
  REQUIRE(!r.authority.empty());
  r.authority.clear();
  const AnswerVerdict v = validate_answer(q, r, trusted_keys(sz), ResolverConfig{});
  CHECK(v.state == SecurityState::Bogus);
  CHECK(v.reason == "wildcard answer without denial");
}

TEST_CASE("denial records must carry their full label count") {
  FreshSource fresh;
  const SignedZone sz = testing::signed_listing7(fresh);
  const Query q = query("zz.example", RecordType::A);
  Response r = answer_query(sz, q);
  const KeyPair& zsk = *sz.keys_with_role(KeyRole::Zsk).front();
  for (auto& rr : r.authority) {
    if (rr.type() != RecordType::RRSIG) continue;
    auto& f = rr.as<RrsigData>();
    if (f.labels == 0) continue;
    std::vector<ResourceRecord> covered;
    for (const auto& other : r.authority) {
      if (other.owner == rr.owner && other.type() == RecordType::NSEC) covered.push_back(other);
    }
    f.labels -= 1;
    f.signature = sign(signing_input(f, rr.owner, RecordType::NSEC, covered), zsk);
  }
  const AnswerVerdict v = validate_answer(q, r, trusted_keys(sz), ResolverConfig{});
  CHECK(v.state == SecurityState::Bogus);
  CHECK(v.reason == "denial record label count");
}

TEST_CASE("verify_link binds DS, KSK and ZSK") {
  FreshSource fresh;
  const SignedZone sz = testing::signed_listing7(fresh);
  const RRSet dnskeys = *sz.zone().find(sz.apex(), RecordType::DNSKEY);
  const ResolverConfig cfg;
  CHECK(verify_link(sz.apex(), ds_for(sz), dnskeys, cfg).state == SecurityState::Secure);
  CHECK(verify_link(sz.apex(), {}, dnskeys, cfg).reason == "no DS");

  // A substituted DNSKEY set signed by the adversary's own keys.
  const auto evil = testing::make_keys(fresh, sz.apex());
  Zone forged_zone = sz.zone();
  const SignedZone forged = sign_zone(std::move(forged_zone), evil);
  const RRSet forged_keys = *forged.zone().find(sz.apex(), RecordType::DNSKEY);
  const ZoneKeys rejected = verify_link(sz.apex(), ds_for(sz), forged_keys, cfg);
  CHECK(rejected.state == SecurityState::Bogus);
  CHECK(rejected.reason == "no DNSKEY matches the DS");

  // KSK signature removed.
  RRSet no_ksk = dnskeys;
  no_ksk.rrsigs.pop_back();
  RRSet no_zsk = dnskeys;
  no_zsk.rrsigs.erase(no_zsk.rrsigs.begin());
  CHECK(verify_link(sz.apex(), ds_for(sz), no_ksk, cfg).state == SecurityState::Bogus);
  CHECK(verify_link(sz.apex(), ds_for(sz), no_zsk, cfg).state == SecurityState::Bogus);
}

TEST_CASE("unsupported algorithms follow the downgrade policy") {
  FreshSource fresh;
  const SignedZone legacy = testing::signed_listing7(fresh, false, 5);
  const RRSet dnskeys = *legacy.zone().find(legacy.apex(), RecordType::DNSKEY);

  ResolverConfig strict;
  const ZoneKeys s = verify_link(legacy.apex(), ds_for(legacy), dnskeys, strict);
  CHECK(s.state == SecurityState::Bogus);
  CHECK(s.reason == "unsupported algorithm");

  ResolverConfig permissive;
  permissive.downgrade_policy = DowngradePolicy::Permissive;
  const ZoneKeys p = verify_link(legacy.apex(), ds_for(legacy), dnskeys, permissive);
  CHECK(p.state == SecurityState::Insecure);

  const Query q = query("ai.example", RecordType::A);
  const Response r = answer_query(legacy, q);
  CHECK(validate_answer(q, r, p, permissive).state == SecurityState::Insecure);
  CHECK(validate_answer(q, r, s, strict).state == SecurityState::Bogus);
}

namespace {

struct Hierarchy {
  SignedZone root;
  SignedZone example;
  SignedZone a;
};

Hierarchy build_hierarchy(FreshSource& fresh) {
  using testing::fixture;
  Zone a = strip_dnssec(load_zone(fixture("zones/a.example.zone")));
  SignedZone a_signed =
      sign_zone(build_nsec_chain(std::move(a)), testing::make_keys(fresh, parse_name("a.example")));

  Zone ex = strip_dnssec(load_zone(fixture("zones/example.zone")));
  set_delegation_ds(ex, parse_name("a.example"), ds_for(a_signed));
  ex.remove(parse_name("b.example"), RecordType::DS);
  SignedZone ex_signed =
      sign_zone(build_nsec_chain(std::move(ex)), testing::make_keys(fresh, parse_name("example")));

  Zone root = strip_dnssec(load_zone(fixture("zones/root.zone")));
  set_delegation_ds(root, parse_name("example"), ds_for(ex_signed));
  SignedZone root_signed =
      sign_zone(build_nsec_chain(std::move(root)), testing::make_keys(fresh, DomainName::root()));
  return {std::move(root_signed), std::move(ex_signed), std::move(a_signed)};
}

ChainLink link_of(const SignedZone& z, const std::optional<DomainName>& child) {
  ChainLink l{z.apex(), *z.zone().find(z.apex(), RecordType::DNSKEY), {}};
  if (child) l.ds_to_next = *z.zone().find(*child, RecordType::DS);
  return l;
}

}  // namespace

TEST_CASE("verify_chain walks the chain of trust from the anchor") {
  FreshSource fresh;
  const Hierarchy h = build_hierarchy(fresh);
  const TrustAnchor anchor{ds_for(h.root)};
  const ResolverConfig cfg;
  std::vector<ChainLink> path{link_of(h.root, parse_name("example")),
                              link_of(h.example, parse_name("a.example")),
                              link_of(h.a, std::nullopt)};

  CHECK(verify_chain(anchor, path, cfg) == ChainResult{true, 0});
  CHECK(verify_chain(anchor, {}, cfg) == ChainResult{true, 0});

  SUBCASE("substituted DNSKEY at level 1") {
    const SignedZone evil = sign_zone(h.example.zone(), testing::make_keys(fresh, parse_name("example")));
    path[1].dnskeys = *evil.zone().find(parse_name("example"), RecordType::DNSKEY);
    CHECK(verify_chain(anchor, path, cfg) == ChainResult{false, 1});
  }
  SUBCASE("wrong anchor") {
    const SignedZone evil = sign_zone(h.root.zone(), testing::make_keys(fresh, DomainName::root()));
    CHECK(verify_chain(TrustAnchor{ds_for(evil)}, path, cfg) == ChainResult{false, 0});
  }
  SUBCASE("DS for level 2 altered in the parent") {
    path[1].ds_to_next.records.front().as<DsData>().key_tag ^= 1;
    CHECK(verify_chain(anchor, path, cfg) == ChainResult{false, 2});
  }
  SUBCASE("DS signatures removed") {
    path[0].ds_to_next.rrsigs.clear();
    CHECK(verify_chain(anchor, path, cfg) == ChainResult{false, 1});
  }
}

TEST_CASE("mixed denial families and the predecessor gap") {
  FreshSource fresh;
  const SignedZone sz = testing::signed_mixed(fresh);
  const ZoneKeys keys = trusted_keys(sz);
  const Query bad = query("bad.example", RecordType::A);

  const Response honest = answer_query(sz, bad, ServerMode::Honest);
  CHECK(honest.rcode == Rcode::ServFail);

  const Response malicious = answer_query(sz, bad, ServerMode::Malicious);
  REQUIRE(malicious.rcode == Rcode::NxDomain);
  ResolverConfig accept;
  const AnswerVerdict v = validate_answer(bad, malicious, keys, accept);
  CHECK(v.state == SecurityState::Secure);
  REQUIRE(v.denial);
  CHECK(v.denial->kind == DenialKind::ProvenNonexistent);
  CHECK(v.denial->families == std::set<DenialFamily>{DenialFamily::Nsec3});

  // A proof that combines both families is rejected under Servfail.
  const Response other = answer_query(sz, query("aa.example", RecordType::A));
  std::vector<ResourceRecord> combined = malicious.authority;
  combined.insert(combined.end(), other.authority.begin(), other.authority.end());
  ResolverConfig strict_mix;
  strict_mix.mixed_denial_policy = MixedDenialPolicy::Servfail;
  const DenialResult d = validate_denial(bad, combined, keys, strict_mix);
  CHECK(d.kind == DenialKind::Invalid);
  CHECK(d.reason == "mixed denial families");
  CHECK(validate_denial(bad, combined, keys, accept).kind == DenialKind::ProvenNonexistent);
}
