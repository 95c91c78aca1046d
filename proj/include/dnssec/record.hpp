#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dnssec/crypto.hpp"
#include "dnssec/name.hpp"
#include "dnssec/term.hpp"

namespace dnssec {

enum class RecordType : std::uint8_t { A, NS, MX, DNSKEY, DS, RRSIG, NSEC, NSEC3 };

inline constexpr RecordType kAllRecordTypes[] = {
    RecordType::A,    RecordType::NS,    RecordType::MX,   RecordType::DNSKEY,
    RecordType::DS,   RecordType::RRSIG, RecordType::NSEC, RecordType::NSEC3,
};

const char* to_string(RecordType t);
/// Throws ParseError for anything outside the closed set.
RecordType parse_record_type(std::string_view text);

using TypeBitmap = std::set<RecordType>;
std::string to_string(const TypeBitmap& types);

inline constexpr std::uint16_t kZoneKeyFlags = 256;
inline constexpr std::uint16_t kSepKeyFlags = 257;

struct AData {
  std::string address;
  friend bool operator==(const AData&, const AData&) = default;
};
struct NsData {
  DomainName target;
  friend bool operator==(const NsData&, const NsData&) = default;
};
struct MxData {
  DomainName exchange;
  friend bool operator==(const MxData&, const MxData&) = default;
};
struct DnskeyData {
  std::uint16_t flags = kZoneKeyFlags;
  AlgorithmId algorithm;
  PublicKey key;
  bool is_ksk() const { return flags == kSepKeyFlags; }
  friend bool operator==(const DnskeyData&, const DnskeyData&) = default;
};
struct DsData {
  std::uint16_t key_tag = 0;
  AlgorithmId algorithm;
  int digest_type = 1;
  Digest digest;
  friend bool operator==(const DsData&, const DsData&) = default;
};
struct RrsigData {
  RecordType type_covered = RecordType::A;
  AlgorithmId algorithm;
  int labels = 0;
  std::uint16_t key_tag = 0;
  DomainName signer;
  std::optional<Signature> signature;
  friend bool operator==(const RrsigData&, const RrsigData&) = default;
};
struct NsecData {
  DomainName next;
  TypeBitmap types;
  friend bool operator==(const NsecData&, const NsecData&) = default;
};
struct Nsec3Data {
  Nsec3Params params;
  HashedLabel next_hashed;
  TypeBitmap types;
  friend bool operator==(const Nsec3Data&, const Nsec3Data&) = default;
};

using Rdata =
    std::variant<AData, NsData, MxData, DnskeyData, DsData, RrsigData, NsecData, Nsec3Data>;

struct ResourceRecord {
  DomainName owner;
  Rdata rdata;

  RecordType type() const { return static_cast<RecordType>(rdata.index()); }
  template <class T>
  const T& as() const {
    return std::get<T>(rdata);
  }
  template <class T>
  T& as() {
    return std::get<T>(rdata);
  }
  /// For RRSIGs the covered type, otherwise the record's own type.
  RecordType covered_type() const;

  friend bool operator==(const ResourceRecord&, const ResourceRecord&) = default;
};

std::string rdata_text(const Rdata& rdata);
/// "owner TYPE rdata"; includes the signature term for RRSIGs.
std::string to_string(const ResourceRecord& rr);
/// Short, stable identifier of a record used by trace events.
std::string fingerprint(const ResourceRecord& rr);

/// Records of one (owner, type) together with the RRSIGs that cover them.
struct RRSet {
  DomainName owner;
  RecordType type = RecordType::A;
  std::vector<ResourceRecord> records;
  std::vector<ResourceRecord> rrsigs;
};

/// Groups a message section into RRsets; RRSIGs join the set they cover.
/// Order follows first appearance.
std::vector<RRSet> group_rrsets(const std::vector<ResourceRecord>& section);

/// Bytes that an RRSIG with the given fields signs: the RRSIG header
/// followed by the sorted records. A wildcard-expanded owner is replaced by
/// "*." plus the rightmost `labels` labels.
std::string signing_input(const RrsigData& fields, const DomainName& owner, RecordType type,
                          const std::vector<ResourceRecord>& records);

struct Query {
  DomainName qname;
  RecordType qtype = RecordType::A;
  bool cd = false;
  bool do_bit = true;
  std::uint64_t qid = 0;
};

enum class Rcode : std::uint8_t { NoError, NxDomain, ServFail, Refused };
const char* to_string(Rcode r);

struct Response {
  Rcode rcode = Rcode::NoError;
  std::vector<ResourceRecord> answer;
  std::vector<ResourceRecord> authority;
  std::vector<ResourceRecord> additional;
  bool ad = false;

  friend bool operator==(const Response&, const Response&) = default;
};

std::string to_string(const Response& r);

Term record_term(const ResourceRecord& rr);
Term response_term(const Response& r);

}  // namespace dnssec
