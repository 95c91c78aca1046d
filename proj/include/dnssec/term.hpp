#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "dnssec/name.hpp"

namespace dnssec {

enum class TermKind : std::uint8_t {
  Atom,   // public constant, e.g. a record type tag or an algorithm code
  Name,   // a domain name carried in clear
  Fresh,  // a nonce or private key; only its creator holds it initially
  App,    // function application: tuple, sign, pk, h
};

/// Immutable message term of the symbolic model.
///
/// Terms are shared, hash-consed by value, and compare structurally. The
/// function symbols are "tuple" (free pairing), "pk" (public key of a private
/// key), "h" (one-way hash) and "sign" (signature); the only equation is
/// verify(sign(m, k), m, pk(k)) = true, implemented in crypto.cpp.
class Term {
 public:
  static Term atom(std::string value);
  static Term name(const DomainName& n);
  static Term fresh(std::string label, std::uint64_t id, std::string creator);
  static Term app(std::string symbol, std::vector<Term> args);
  static Term tuple(std::vector<Term> args) { return app("tuple", std::move(args)); }

  TermKind kind() const;
  /// Atom value, Name text, Fresh label, or function symbol.
  const std::string& symbol() const;
  const std::vector<Term>& args() const;
  /// For Fresh terms: identifier and owner role.
  std::uint64_t fresh_id() const;
  const std::string& creator() const;

  bool is_app(const char* symbol) const;

  std::size_t hash() const;
  std::string to_string() const;

  friend bool operator==(const Term& a, const Term& b);
  friend bool operator<(const Term& a, const Term& b);

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct TermHash {
  std::size_t operator()(const Term& t) const noexcept { return t.hash(); }
};

}  // namespace dnssec
