#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace dnssec {

/// A fully qualified domain name.
///
/// Labels are stored lower-cased, leftmost first and root-last
/// ("x.w.example" is {"x", "w", "example"}); the root itself has no labels.
/// Ordering and equality follow the DNSSEC canonical name order: labels are
/// compared right to left, bytewise within a label, and a name sorts before
/// all of its descendants.
class DomainName {
 public:
  DomainName() = default;
  explicit DomainName(std::vector<std::string> labels);

  static DomainName root() { return DomainName(); }

  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t label_count() const { return labels_.size(); }
  /// Label count as carried in an RRSIG: a leading "*" is not counted.
  std::size_t signature_label_count() const;

  bool is_root() const { return labels_.empty(); }
  bool is_wildcard() const { return !labels_.empty() && labels_.front() == "*"; }

  DomainName parent() const;
  DomainName child(std::string label) const;
  DomainName wildcard_child() const { return child("*"); }
  /// The rightmost `n` labels.
  DomainName suffix(std::size_t n) const;

  /// True if this name equals `ancestor` or lies below it.
  bool is_subdomain_of(const DomainName& ancestor) const;
  bool is_strict_subdomain_of(const DomainName& ancestor) const {
    return label_count() > ancestor.label_count() && is_subdomain_of(ancestor);
  }

  /// Dotted text without trailing dot; the root prints as ".". Bytes outside
  /// the printable range are written as \DDD.
  std::string to_string() const;

  friend bool operator==(const DomainName&, const DomainName&) = default;
  friend std::strong_ordering operator<=>(const DomainName& a, const DomainName& b);

 private:
  std::vector<std::string> labels_;
};

using NameSet = std::set<DomainName>;

/// Parses dotted text ("A.Example", "x.w.example.", "."); \DDD escapes allowed.
DomainName parse_name(std::string_view text);

std::strong_ordering canonical_cmp(const DomainName& a, const DomainName& b);

/// Longest ancestor of `q` (or `q` itself) present in `zone_names`.
/// Throws OutOfZone when no member of `zone_names` encloses `q`.
DomainName closest_encloser(const NameSet& zone_names, const DomainName& q);

/// Longest name that is an ancestor-or-self of both arguments.
DomainName common_ancestor(const DomainName& a, const DomainName& b);

}  // namespace dnssec

template <>
struct std::hash<dnssec::DomainName> {
  std::size_t operator()(const dnssec::DomainName& n) const noexcept;
};
