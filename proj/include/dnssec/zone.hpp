#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dnssec/crypto.hpp"
#include "dnssec/name.hpp"
#include "dnssec/record.hpp"

namespace dnssec {

enum class DenialFamily : std::uint8_t { Nsec, Nsec3 };
const char* to_string(DenialFamily f);

enum class ChainMode : std::uint8_t { None, NsecOnly, Nsec3Only, Mixed };

using ChainAssignment = std::map<DomainName, DenialFamily>;

struct RRKey {
  DomainName owner;
  RecordType type;
  friend auto operator<=>(const RRKey&, const RRKey&) = default;
};

/// Zone contents. NSEC3 RRsets live apart from the name tree, keyed by the
/// hashed owner, so that hashed owner names never count as zone names.
class Zone {
 public:
  explicit Zone(DomainName apex, Nsec3Hasher hasher = nsec3_hash);

  const DomainName& apex() const { return apex_; }

  /// Throws OutOfZone when rr.owner is not at or below the apex. NSEC3
  /// records are indexed by the hash label of their owner.
  void add(ResourceRecord rr);
  void remove(const DomainName& owner, RecordType type);
  void remove_type(RecordType type);

  const std::map<RRKey, RRSet>& rrsets() const { return rrsets_; }
  std::map<RRKey, RRSet>& rrsets() { return rrsets_; }
  const std::map<HashedLabel, RRSet>& nsec3_rrsets() const { return nsec3_; }
  std::map<HashedLabel, RRSet>& nsec3_rrsets() { return nsec3_; }

  const RRSet* find(const DomainName& owner, RecordType type) const;
  TypeBitmap types_at(const DomainName& owner) const;

  NameSet owners() const;
  /// Owners other than the apex that carry NS.
  NameSet delegations() const;
  /// The delegation point at or above `name`, if any (never the apex).
  std::optional<DomainName> delegation_for(const DomainName& name) const;
  /// Owners not strictly below a delegation point (glue excluded).
  NameSet authoritative_names() const;
  NameSet empty_non_terminals() const;
  /// authoritative_names() plus empty non-terminals.
  NameSet existing_names() const;

  ChainMode chain_mode() const { return mode_; }
  const ChainAssignment& assignment() const { return assignment_; }
  const std::optional<Nsec3Params>& nsec3_params() const { return params_; }
  /// Family of the denial record owned by `name` (mixed zones consult the
  /// assignment).
  std::optional<DenialFamily> family_of(const DomainName& name) const;

  HashedLabel hash(const DomainName& name) const;
  const std::map<HashedLabel, DomainName>& hashed_names() const { return hashed_names_; }
  const Nsec3Hasher& hasher() const { return hasher_; }

  void set_chain(ChainMode mode, ChainAssignment assignment, std::optional<Nsec3Params> params);

 private:
  DomainName apex_;
  Nsec3Hasher hasher_;
  std::map<RRKey, RRSet> rrsets_;
  std::map<HashedLabel, RRSet> nsec3_;
  std::map<HashedLabel, DomainName> hashed_names_;
  ChainMode mode_ = ChainMode::None;
  ChainAssignment assignment_;
  std::optional<Nsec3Params> params_;
};

/// Parses the line-oriented zone format. Lines are `OWNER TYPE RDATA...`;
/// a line starting with whitespace continues the previous owner; `//`
/// starts a comment; `$ORIGIN name` fixes the apex (otherwise the apex is
/// the closest common ancestor of all owners).
Zone load_zone(std::string_view zone_text);

/// Removes DNSKEY, RRSIG, NSEC and NSEC3 so a transcribed zone can be rebuilt.
Zone strip_dnssec(Zone z);

Zone build_nsec_chain(Zone z);
Zone build_nsec3_chain(Zone z, const Nsec3Params& params);
/// NSEC owners point to their canonical successor among all authoritative
/// names; NSEC3 owners to their hash-order successor among all of them.
Zone build_mixed_chain(Zone z, const ChainAssignment& assignment, const Nsec3Params& params);

/// True iff `name` falls strictly between `owner` and `next` in canonical
/// order, treating next <= owner as the wrap back to the apex.
bool nsec_covers(const DomainName& owner, const DomainName& next, const DomainName& name);
bool nsec3_covers(const HashedLabel& owner, const HashedLabel& next, const HashedLabel& h);

class SignedZone {
 public:
  SignedZone(Zone zone, std::vector<KeyPair> keys, SignLog log);

  const Zone& zone() const { return zone_; }
  const DomainName& apex() const { return zone_.apex(); }
  const std::vector<KeyPair>& keys() const { return keys_; }
  std::vector<const KeyPair*> keys_with_role(KeyRole role) const;
  const SignLog& sign_log() const { return log_; }

 private:
  Zone zone_;
  std::vector<KeyPair> keys_;
  SignLog log_;
};

/// Publishes the DNSKEY RRset and signs every authoritative RRset with each
/// ZSK; the DNSKEY RRset is additionally signed by each KSK. Delegation NS
/// sets and glue stay unsigned.
SignedZone sign_zone(Zone z, std::vector<KeyPair> keys);
SignedZone sign_zone(Zone z, const KeyPair& zsk, const KeyPair& ksk);

/// RRSIG over `records` (owner/type taken from the first record).
ResourceRecord make_rrsig(const std::vector<ResourceRecord>& records, const KeyPair& key,
                          const DomainName& signer, SignLog* log = nullptr);

Digest dnskey_digest(const DomainName& owner, const DnskeyData& key);
/// One DS per KSK of the child.
std::vector<ResourceRecord> ds_for(const SignedZone& child);
/// Replaces the DS RRset at `child` in a (not yet signed) parent zone.
void set_delegation_ds(Zone& parent, const DomainName& child, std::vector<ResourceRecord> ds);

enum class ServerMode : std::uint8_t {
  Honest,
  /// In a mixed zone, answer a name error with the denial record of the
  /// canonical predecessor even when it belongs to the NSEC3 family.
  Malicious,
};

Response answer_query(const SignedZone& zone, const Query& q, ServerMode mode = ServerMode::Honest);

}  // namespace dnssec
