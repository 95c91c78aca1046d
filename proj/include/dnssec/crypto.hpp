#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "dnssec/name.hpp"
#include "dnssec/term.hpp"

namespace dnssec {

struct AlgorithmId {
  int code = 8;
  friend auto operator<=>(const AlgorithmId&, const AlgorithmId&) = default;
};

enum class KeyRole : std::uint8_t { Zsk, Ksk };

const char* to_string(KeyRole role);

struct PublicKey {
  Term term;  // pk(private)
  friend bool operator==(const PublicKey&, const PublicKey&) = default;
};

struct Signature {
  Term term;
  friend bool operator==(const Signature&, const Signature&) = default;
};

struct Digest {
  Term term;
  friend bool operator==(const Digest&, const Digest&) = default;
};

/// Deterministic source of fresh names (nonces, private keys).
class FreshSource {
 public:
  Term next(std::string label, std::string creator);

 private:
  std::uint64_t counter_ = 0;
};

class KeyPair {
 public:
  KeyPair(Term private_key, KeyRole role, AlgorithmId algorithm, std::string key_id,
          std::uint16_t key_tag);

  const std::string& key_id() const { return key_id_; }
  std::uint16_t key_tag() const { return key_tag_; }
  KeyRole role() const { return role_; }
  AlgorithmId algorithm() const { return algorithm_; }
  const PublicKey& public_key() const { return public_; }
  /// Only zone authorities hold KeyPair values; never place this in a message.
  const Term& private_term() const { return private_; }

 private:
  Term private_;
  KeyRole role_;
  AlgorithmId algorithm_;
  std::string key_id_;
  std::uint16_t key_tag_;
  PublicKey public_;
};

/// Creates a key owned by `owner` (used as the Fresh creator tag).
KeyPair generate_key(FreshSource& fresh, const std::string& owner, KeyRole role,
                     AlgorithmId algorithm);

PublicKey public_key_of(const Term& private_key);

struct SignRecord {
  std::string key_id;
  std::string message_digest;  // short_digest of the canonical input
};

class SignLog {
 public:
  void record(SignRecord r) { entries_.push_back(std::move(r)); }
  const std::vector<SignRecord>& entries() const { return entries_; }

 private:
  std::vector<SignRecord> entries_;
};

Term message_term(std::string_view canonical);

/// sign(<h(m), alg>, sk). When `log` is given the event is appended to it.
Signature sign(std::string_view canonical, const KeyPair& key, SignLog* log = nullptr);
/// Signature under an arbitrary private term; used by the adversary with its
/// own keys. Never verifies against a zone key.
Signature sign_with(std::string_view canonical, const Term& private_key, AlgorithmId algorithm);

bool verify(const Signature& sig, std::string_view canonical, const PublicKey& pub);

Digest hash(const Term& input);
Digest hash(std::string_view input);

/// Printable fingerprint of a byte string (first 12 hex digits of SHA-1).
std::string short_digest(std::string_view input);

struct Nsec3Params {
  int algorithm = 1;
  int iterations = 0;
  std::string salt_hex;  // empty for no salt

  friend bool operator==(const Nsec3Params&, const Nsec3Params&) = default;
  std::string to_string() const;
};

/// Base32hex (lower-case) owner hash; lexical order equals digest order.
struct HashedLabel {
  std::string value;
  friend auto operator<=>(const HashedLabel&, const HashedLabel&) = default;
};

using Nsec3Hasher = std::function<HashedLabel(const DomainName&, const Nsec3Params&)>;

/// Iterated SHA-1 over the canonical wire form of `name` and the salt.
HashedLabel nsec3_hash(const DomainName& name, const Nsec3Params& params);

}  // namespace dnssec
