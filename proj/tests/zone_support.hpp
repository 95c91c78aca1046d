#pragma once

#include "dnssec/validator.hpp"
#include "dnssec/zone.hpp"
#include "support.hpp"

namespace testing {

inline const dnssec::Nsec3Params kSalt{1, 0, "0021"};

inline std::vector<dnssec::KeyPair> make_keys(dnssec::FreshSource& fresh,
                                              const dnssec::DomainName& apex, int alg = 8) {
  using namespace dnssec;
  return {generate_key(fresh, apex.to_string(), KeyRole::Zsk, AlgorithmId{alg}),
          generate_key(fresh, apex.to_string(), KeyRole::Ksk, AlgorithmId{alg})};
}

inline dnssec::SignedZone signed_listing7(dnssec::FreshSource& fresh, bool nsec3 = false,
                                          int alg = 8) {
  using namespace dnssec;
  Zone z = strip_dnssec(load_zone(fixture("zones/example.zone")));
  z = nsec3 ? build_nsec3_chain(std::move(z), kSalt) : build_nsec_chain(std::move(z));
  return sign_zone(std::move(z), make_keys(fresh, parse_name("example"), alg));
}

inline dnssec::SignedZone signed_mixed(dnssec::FreshSource& fresh) {
  using namespace dnssec;
  Zone z = strip_dnssec(load_zone(fixture("zones/mixed.zone")));
  ChainAssignment assignment{{parse_name("example"), DenialFamily::Nsec},
                             {parse_name("a.example"), DenialFamily::Nsec},
                             {parse_name("b.example"), DenialFamily::Nsec3},
                             {parse_name("c.example"), DenialFamily::Nsec}};
  z = build_mixed_chain(std::move(z), assignment, kSalt);
  return sign_zone(std::move(z), make_keys(fresh, parse_name("example")));
}

/// Keys of `sz` as a resolver holding its DS set would accept them.
inline dnssec::ZoneKeys trusted_keys(const dnssec::SignedZone& sz,
                                     const dnssec::ResolverConfig& cfg = {}) {
  using namespace dnssec;
  return verify_link(sz.apex(), ds_for(sz), *sz.zone().find(sz.apex(), RecordType::DNSKEY), cfg);
}

}  // namespace testing
