#pragma once

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dnssec/name.hpp"

namespace testing {

inline std::string fixture(const std::string& rel) {
  std::ifstream in(std::string(FIXTURE_DIR) + "/" + rel);
  if (!in) throw std::runtime_error("missing fixture " + rel);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Reference canonical order: compare reversed label lists lexicographically
// as unsigned byte strings. Written without touching DomainName's operators.
inline bool reference_less(const dnssec::DomainName& a, const dnssec::DomainName& b) {
  std::vector<std::string> ra(a.labels().rbegin(), a.labels().rend());
  std::vector<std::string> rb(b.labels().rbegin(), b.labels().rend());
  auto byte_less = [](const std::string& x, const std::string& y) {
    return std::lexicographical_compare(
        x.begin(), x.end(), y.begin(), y.end(),
        [](char p, char q) { return static_cast<unsigned char>(p) < static_cast<unsigned char>(q); });
  };
  return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end(), byte_less);
}

// Random names below `apex` with short labels over a small alphabet so that
// shared prefixes and ancestor relations are frequent.
class NameGen {
 public:
  explicit NameGen(std::uint64_t seed) : rng_(seed) {}

  std::string label() {
    static const char alphabet[] = "ab*0z-";
    std::uniform_int_distribution<int> len(1, 3);
    std::uniform_int_distribution<int> pick(0, 5);
    std::string s;
    const int n = len(rng_);
    for (int i = 0; i < n; ++i) s += alphabet[pick(rng_)];
    if (s.find('*') != std::string::npos && s != "*") s.erase(std::remove(s.begin(), s.end(), '*'), s.end());
    if (s.empty()) s = "a";
    return s;
  }

  dnssec::DomainName below(const dnssec::DomainName& apex, int max_depth = 3) {
    std::uniform_int_distribution<int> depth(1, max_depth);
    dnssec::DomainName n = apex;
    const int d = depth(rng_);
    for (int i = 0; i < d; ++i) n = n.child(label());
    return n;
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace testing
