#include "dnssec/name.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

#include "dnssec/errors.hpp"

namespace dnssec {

namespace {

std::string lower(std::string s) {
  for (char& c : s) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return s;
}

std::strong_ordering compare_labels(const std::string& a, const std::string& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto ca = static_cast<unsigned char>(a[i]);
    const auto cb = static_cast<unsigned char>(b[i]);
    if (ca != cb) return ca <=> cb;
  }
  return a.size() <=> b.size();
}

}  // namespace

DomainName::DomainName(std::vector<std::string> labels) : labels_(std::move(labels)) {
  for (auto& l : labels_) {
    if (l.empty()) throw ParseError("empty label in domain name");
    if (l.size() > 63) throw ParseError("label longer than 63 octets");
    l = lower(std::move(l));
  }
}

std::size_t DomainName::signature_label_count() const {
  return is_wildcard() ? labels_.size() - 1 : labels_.size();
}

DomainName DomainName::parent() const {
  if (is_root()) return *this;
  DomainName p;
  p.labels_.assign(labels_.begin() + 1, labels_.end());
  return p;
}

DomainName DomainName::child(std::string label) const {
  std::vector<std::string> labels;
  labels.reserve(labels_.size() + 1);
  labels.push_back(std::move(label));
  labels.insert(labels.end(), labels_.begin(), labels_.end());
  return DomainName(std::move(labels));
}

DomainName DomainName::suffix(std::size_t n) const {
  n = std::min(n, labels_.size());
  DomainName s;
  s.labels_.assign(labels_.end() - static_cast<std::ptrdiff_t>(n), labels_.end());
  return s;
}

bool DomainName::is_subdomain_of(const DomainName& ancestor) const {
  if (ancestor.label_count() > label_count()) return false;
  return std::equal(ancestor.labels_.rbegin(), ancestor.labels_.rend(), labels_.rbegin());
}

std::string DomainName::to_string() const {
  if (is_root()) return ".";
  std::string out;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (i) out += '.';
    for (char c : labels_[i]) {
      const auto u = static_cast<unsigned char>(c);
      if (u <= 0x20 || u >= 0x7f || c == '.' || c == '\\') {
        char buf[5];
        std::snprintf(buf, sizeof buf, "\\%03u", u);
        out += buf;
      } else {
        out += c;
      }
    }
  }
  return out;
}

std::strong_ordering operator<=>(const DomainName& a, const DomainName& b) {
  auto ia = a.labels_.rbegin();
  auto ib = b.labels_.rbegin();
  for (; ia != a.labels_.rend() && ib != b.labels_.rend(); ++ia, ++ib) {
    if (auto c = compare_labels(*ia, *ib); c != 0) return c;
  }
  return a.labels_.size() <=> b.labels_.size();
}

std::strong_ordering canonical_cmp(const DomainName& a, const DomainName& b) { return a <=> b; }

DomainName parse_name(std::string_view text) {
  if (text.empty()) throw ParseError("empty domain name");
  if (text == ".") return DomainName::root();
  if (text.back() == '.') text.remove_suffix(1);

  std::vector<std::string> labels;
  std::string current;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\\') {
      if (i + 3 < text.size() + 0 && std::isdigit(static_cast<unsigned char>(text[i + 1])) &&
          std::isdigit(static_cast<unsigned char>(text[i + 2])) &&
          std::isdigit(static_cast<unsigned char>(text[i + 3]))) {
        const int v = (text[i + 1] - '0') * 100 + (text[i + 2] - '0') * 10 + (text[i + 3] - '0');
        if (v > 255) throw ParseError("escape out of range in '" + std::string(text) + "'");
        current += static_cast<char>(v);
        i += 3;
      } else if (i + 1 < text.size()) {
        current += text[++i];
      } else {
        throw ParseError("dangling escape in '" + std::string(text) + "'");
      }
    } else if (c == '.') {
      if (current.empty()) throw ParseError("empty label in '" + std::string(text) + "'");
      labels.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  if (current.empty()) throw ParseError("empty label in '" + std::string(text) + "'");
  labels.push_back(std::move(current));
  return DomainName(std::move(labels));
}

DomainName closest_encloser(const NameSet& zone_names, const DomainName& q) {
  DomainName candidate = q;
  while (true) {
    if (zone_names.contains(candidate)) return candidate;
    if (candidate.is_root()) break;
    candidate = candidate.parent();
  }
  throw OutOfZone(q.to_string() + " is not enclosed by the zone");
}

DomainName common_ancestor(const DomainName& a, const DomainName& b) {
  std::size_t n = 0;
  auto ia = a.labels().rbegin();
  auto ib = b.labels().rbegin();
  for (; ia != a.labels().rend() && ib != b.labels().rend() && *ia == *ib; ++ia, ++ib) ++n;
  return a.suffix(n);
}

}  // namespace dnssec

std::size_t std::hash<dnssec::DomainName>::operator()(const dnssec::DomainName& n) const noexcept {
  std::size_t h = 0x9e3779b97f4a7c15ULL;
  for (const auto& l : n.labels()) {
    h ^= std::hash<std::string>{}(l) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}
