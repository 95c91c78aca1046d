#include "dnssec/crypto.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>

#include "dnssec/errors.hpp"

namespace dnssec {

namespace {

using Sha1 = std::array<unsigned char, 20>;

Sha1 sha1(const std::string& bytes) {
  Sha1 out{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), out.data(), &len, EVP_sha1(), nullptr) != 1) {
    throw Error("SHA-1 digest failed");
  }
  return out;
}

std::string from_hex(const std::string& hex) {
  if (hex.size() % 2) throw ParseError("odd-length hex salt '" + hex + "'");
  std::string out;
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    out += static_cast<char>(std::stoi(hex.substr(i, 2), nullptr, 16));
  }
  return out;
}

std::string wire_form(const DomainName& name) {
  std::string out;
  for (const auto& label : name.labels()) {
    out += static_cast<char>(label.size());
    out += label;
  }
  out += '\0';
  return out;
}

std::string base32hex(const Sha1& digest) {
  static constexpr char alphabet[] = "0123456789abcdefghijklmnopqrstuv";
  std::string out;
  std::uint32_t buffer = 0;
  int bits = 0;
  for (unsigned char byte : digest) {
    buffer = (buffer << 8) | byte;
    bits += 8;
    while (bits >= 5) {
      out += alphabet[(buffer >> (bits - 5)) & 0x1f];
      bits -= 5;
    }
  }
  if (bits > 0) out += alphabet[(buffer << (5 - bits)) & 0x1f];
  return out;
}

Term algorithm_atom(AlgorithmId alg) { return Term::atom("alg" + std::to_string(alg.code)); }

}  // namespace

const char* to_string(KeyRole role) { return role == KeyRole::Zsk ? "ZSK" : "KSK"; }

Term FreshSource::next(std::string label, std::string creator) {
  return Term::fresh(std::move(label), ++counter_, std::move(creator));
}

KeyPair::KeyPair(Term private_key, KeyRole role, AlgorithmId algorithm, std::string key_id,
                 std::uint16_t key_tag)
    : private_(std::move(private_key)),
      role_(role),
      algorithm_(algorithm),
      key_id_(std::move(key_id)),
      key_tag_(key_tag),
      public_(public_key_of(private_)) {}

PublicKey public_key_of(const Term& private_key) { return {Term::app("pk", {private_key})}; }

KeyPair generate_key(FreshSource& fresh, const std::string& owner, KeyRole role,
                     AlgorithmId algorithm) {
  const std::string label = owner + "/" + to_string(role) + std::to_string(algorithm.code);
  Term sk = fresh.next(label, owner);
  const auto tag = static_cast<std::uint16_t>(10000 + sk.fresh_id());
  return KeyPair(sk, role, algorithm, label + "#" + std::to_string(sk.fresh_id()), tag);
}

Term message_term(std::string_view canonical) { return Term::atom(std::string(canonical)); }

Signature sign(std::string_view canonical, const KeyPair& key, SignLog* log) {
  if (log) log->record({key.key_id(), short_digest(canonical)});
  return sign_with(canonical, key.private_term(), key.algorithm());
}

Signature sign_with(std::string_view canonical, const Term& private_key, AlgorithmId algorithm) {
  Term payload = Term::tuple({hash(message_term(canonical)).term, algorithm_atom(algorithm)});
  return {Term::app("sign", {std::move(payload), private_key})};
}

bool verify(const Signature& sig, std::string_view canonical, const PublicKey& pub) {
  const Term& s = sig.term;
  if (!s.is_app("sign") || s.args().size() != 2) return false;
  const Term& payload = s.args()[0];
  if (!payload.is_app("tuple") || payload.args().size() != 2) return false;
  if (!(public_key_of(s.args()[1]) == pub)) return false;
  return payload.args()[0] == hash(message_term(canonical)).term;
}

Digest hash(const Term& input) { return {Term::app("h", {input})}; }
Digest hash(std::string_view input) { return hash(message_term(input)); }

std::string short_digest(std::string_view input) {
  const Sha1 d = sha1(std::string(input));
  std::string out;
  char buf[3];
  for (std::size_t i = 0; i < 6; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", d[i]);
    out += buf;
  }
  return out;
}

std::string Nsec3Params::to_string() const {
  return std::to_string(algorithm) + ":" + std::to_string(iterations) + ":" +
         (salt_hex.empty() ? "-" : salt_hex);
}

HashedLabel nsec3_hash(const DomainName& name, const Nsec3Params& params) {
  if (params.iterations < 0) throw Error("negative NSEC3 iteration count");
  const std::string salt = from_hex(params.salt_hex);
  Sha1 digest = sha1(wire_form(name) + salt);
  for (int i = 0; i < params.iterations; ++i) {
    digest = sha1(std::string(digest.begin(), digest.end()) + salt);
  }
  return {base32hex(digest)};
}

}  // namespace dnssec
