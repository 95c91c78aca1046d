#include <doctest.h>

#include <algorithm>

#include "dnssec/errors.hpp"
#include "dnssec/name.hpp"
#include "support.hpp"

using namespace dnssec;

TEST_CASE("parse_name splits and lower-cases labels") {
  CHECK(parse_name("x.w.example").labels() == std::vector<std::string>{"x", "w", "example"});
  CHECK(parse_name("example").labels() == std::vector<std::string>{"example"});
  CHECK(parse_name("A.Example").labels() == std::vector<std::string>{"a", "example"});
  CHECK(parse_name("xx.example.") == parse_name("xx.example"));
  CHECK(parse_name(".").is_root());
  CHECK_THROWS_AS(parse_name("a..example"), ParseError);
  CHECK_THROWS_AS(parse_name(""), ParseError);
}

TEST_CASE("escaped bytes round-trip") {
  const DomainName n = parse_name("\\000.a.example");
  CHECK(n.labels().front() == std::string(1, '\0'));
  CHECK(n.to_string() == "\\000.a.example");
  CHECK(parse_name(n.to_string()) == n);
}

TEST_CASE("canonical order") {
  CHECK(canonical_cmp(parse_name("example"), parse_name("a.example")) < 0);
  CHECK(canonical_cmp(parse_name("a.example"), parse_name("a.example")) == 0);
  CHECK(parse_name("z.example") < parse_name("a.z.example"));
  CHECK(parse_name("*.w.example") < parse_name("x.w.example"));
  CHECK(parse_name("example") < parse_name("\\000.example"));
  CHECK(parse_name("\\000.example") < parse_name("a.example"));

  std::vector<DomainName> owners;
  for (const char* s : {"xx.example", "x.y.w.example", "b.example", "*.w.example", "ns.example",
                        "x.w.example", "a.example", "example", "ai.example"}) {
    owners.push_back(parse_name(s));
  }
  std::sort(owners.begin(), owners.end());
  std::vector<std::string> got;
  for (const auto& n : owners) got.push_back(n.to_string());
  CHECK(got == std::vector<std::string>{"example", "a.example", "ai.example", "b.example",
                                        "ns.example", "*.w.example", "x.w.example",
                                        "x.y.w.example", "xx.example"});
}

TEST_CASE("canonical order agrees with the reference comparator and is a total order") {
  testing::NameGen gen(7);
  const DomainName apex = parse_name("example");
  std::vector<DomainName> names;
  for (int i = 0; i < 120; ++i) names.push_back(gen.below(apex));
  names.push_back(apex);
  for (const auto& a : names) {
    for (const auto& b : names) {
      const auto c = canonical_cmp(a, b);
      CHECK((c < 0) == testing::reference_less(a, b));
      CHECK((c == 0) == (a == b));
      CHECK((c < 0) == (canonical_cmp(b, a) > 0));
    }
  }
  for (std::size_t i = 0; i + 2 < names.size(); i += 3) {
    const auto& a = names[i];
    const auto& b = names[i + 1];
    const auto& c = names[i + 2];
    if (a < b && b < c) CHECK(a < c);
  }
}

TEST_CASE("closest_encloser") {
  const NameSet zone{parse_name("example"), parse_name("b.example")};
  CHECK(closest_encloser(zone, parse_name("a.b.example")) == parse_name("b.example"));
  CHECK(closest_encloser(NameSet{parse_name("example")}, parse_name("example")) ==
        parse_name("example"));
  CHECK_THROWS_AS(closest_encloser(zone, parse_name("org")), OutOfZone);
}

TEST_CASE("closest_encloser matches a linear ancestor scan") {
  testing::NameGen gen(11);
  const DomainName apex = parse_name("example");
  for (int round = 0; round < 300; ++round) {
    NameSet zone{apex};
    std::uniform_int_distribution<int> size(0, 7);
    for (int i = size(gen.rng()); i > 0; --i) zone.insert(gen.below(apex));
    const DomainName q = gen.below(apex, 4);

    // Oracle: walk every member and keep the longest one that is a suffix of q.
    DomainName best = apex;
    for (const auto& z : zone) {
      const auto& zl = z.labels();
      const auto& ql = q.labels();
      const bool suffix = zl.size() <= ql.size() && std::equal(zl.rbegin(), zl.rend(), ql.rbegin());
      if (suffix && zl.size() > best.labels().size()) best = z;
    }
    CHECK(closest_encloser(zone, q) == best);
  }
}

TEST_CASE("name helpers") {
  const DomainName w = parse_name("*.w.example");
  CHECK(w.is_wildcard());
  CHECK(w.signature_label_count() == 2);
  CHECK(w.parent() == parse_name("w.example"));
  CHECK(parse_name("x.y.w.example").suffix(2) == parse_name("w.example"));
  CHECK(parse_name("x.w.example").is_subdomain_of(parse_name("example")));
  CHECK_FALSE(parse_name("example").is_strict_subdomain_of(parse_name("example")));
  CHECK(common_ancestor(parse_name("a.b.example"), parse_name("c.b.example")) == parse_name("b.example"));
}
