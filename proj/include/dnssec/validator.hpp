#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dnssec/cache.hpp"
#include "dnssec/record.hpp"
#include "dnssec/zone.hpp"

namespace dnssec {

enum class DowngradePolicy : std::uint8_t { Strict, Permissive };
enum class CachePartitioning : std::uint8_t { Unified, ByValidationState };
enum class MixedDenialPolicy : std::uint8_t { Accept, Servfail };

struct ResolverConfig {
  std::set<AlgorithmId> supported_algorithms{AlgorithmId{8}, AlgorithmId{13}};
  DowngradePolicy downgrade_policy = DowngradePolicy::Strict;
  CachePartitioning cache_partitioning = CachePartitioning::Unified;
  MixedDenialPolicy mixed_denial_policy = MixedDenialPolicy::Accept;
  bool cache_enabled = true;
  int depth_bound = 8;
  double expiry_probability = 0.0;
  /// Longest lock hold, in events of the holding activity.
  int delta = 16;
  Nsec3Hasher hasher = nsec3_hash;

  bool supports(AlgorithmId a) const { return supported_algorithms.contains(a); }
};

struct TrustAnchor {
  std::vector<ResourceRecord> ds;  // DS set for the root KSK
};

/// Keys a resolver trusts for one zone after checking its DNSKEY RRset.
struct ZoneKeys {
  DomainName apex;
  std::vector<DnskeyData> keys;
  SecurityState state = SecurityState::Bogus;
  std::string reason;
};

/// Short identifier of a public key, shared by sign and accept events.
std::string key_fingerprint(const PublicKey& key);

enum class RrsigResult : std::uint8_t { Ok, Bogus, UnsupportedAlgorithm };

/// Checks one RRSIG over `rrset.records` with one key.
RrsigResult validate_rrsig(const RRSet& rrset, const ResourceRecord& sig, const DnskeyData& key,
                           const ResolverConfig& cfg);

/// Outcome of validating a whole RRset against a zone's trusted keys.
struct RRsetVerdict {
  SecurityState state = SecurityState::Bogus;
  std::string reason;
  std::optional<DnskeyData> key;  // the key whose signature verified
  std::string message_digest;     // short digest of the verified signing input
  const ResourceRecord* rrsig = nullptr;
};

RRsetVerdict validate_rrset(const RRSet& rrset, const ZoneKeys& keys, const ResolverConfig& cfg);

/// One DS-to-DNSKEY link: a supported KSK matching a DS digest, its
/// signature over the DNSKEY RRset, and a ZSK signature over the same set.
ZoneKeys verify_link(const DomainName& apex, const std::vector<ResourceRecord>& ds_set,
                     const RRSet& dnskeys, const ResolverConfig& cfg);

struct ChainLink {
  DomainName apex;
  RRSet dnskeys;
  RRSet ds_to_next;  // DS RRset (with RRSIGs) for the next link; empty for the last
};

struct ChainResult {
  bool valid = true;
  std::size_t abort_level = 0;
  friend bool operator==(const ChainResult&, const ChainResult&) = default;
};

/// Root-first walk: level i succeeds iff its DNSKEY RRset is bound to the DS
/// set of level i-1 (the anchor for i = 0) and that DS set verified under the
/// keys of level i-1. Returns Abort(i) at the first failing level.
ChainResult verify_chain(const TrustAnchor& anchor, const std::vector<ChainLink>& path,
                         const ResolverConfig& cfg);

enum class DenialKind : std::uint8_t { ProvenNonexistent, ProvenNoData, Invalid };
const char* to_string(DenialKind k);

struct DenialLink {
  DenialFamily family;
  DomainName owner;     // plain owner for NSEC, hashed owner name for NSEC3
  std::string next;     // next name (NSEC) or next hash label (NSEC3)
};

struct DenialResult {
  DenialKind kind = DenialKind::Invalid;
  SecurityState state = SecurityState::Bogus;
  std::set<DenialFamily> families;
  std::vector<DenialLink> links;
  std::vector<RRsetVerdict> verdicts;  // one per proof RRset, same order as `proof_sets`
  std::vector<RRSet> proof_sets;
  std::string reason;
};

/// Authenticated denial of existence over the NSEC/NSEC3 records of `proof`.
DenialResult validate_denial(const Query& q, const std::vector<ResourceRecord>& proof,
                             const ZoneKeys& keys, const ResolverConfig& cfg);

/// Whether `proof` shows that `q` has no exact match under closest encloser
/// `ce` (used for wildcard answers).
bool proves_no_exact_match(const Query& q, const DomainName& ce,
                           const std::vector<ResourceRecord>& proof, const ZoneKeys& keys,
                           const ResolverConfig& cfg);

struct AcceptedRRset {
  DomainName zone;
  RRSet rrset;
  DnskeyData key;
  std::string message_digest;
  SecurityState state = SecurityState::Secure;
};

struct AnswerVerdict {
  SecurityState state = SecurityState::Bogus;
  std::string reason;
  std::vector<AcceptedRRset> accepted;
  std::optional<DenialResult> denial;
};

/// Validates a final (non-referral) response for `q` from the zone whose
/// keys are given.
AnswerVerdict validate_answer(const Query& q, const Response& r, const ZoneKeys& keys,
                              const ResolverConfig& cfg);

}  // namespace dnssec
