#pragma once

// Reference models shared by the unit tests and the acceptance runner.

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dnssec/cache.hpp"
#include "dnssec/zone.hpp"
#include "support.hpp"

namespace oracles {

using namespace dnssec;

inline CacheKey key_for(int i) {
  return CacheKey{"ns", parse_name(i == 0 ? "a.example" : "b.example"), RecordType::A, Partition::Unified};
}

// ---------------------------------------------------------------- history

enum class OpKind { Read, Write, Expire };

struct Op {
  OpKind kind = OpKind::Read;
  int key = 0;
  std::string value;  // written value
  int yields = 0;     // decision points while holding the lock
  int invoked = -1;
  int returned = -1;
  std::optional<std::string> observed;  // read result
};

inline Task<void> run_ops(Scheduler& sched, LockTable& locks, Cache& cache, std::vector<Op>& ops, int& clock) {
  for (auto& op : ops) {
    op.invoked = clock++;
    auto y = sched.yield();
    co_await y;
    auto acquiring = locks.acquire(key_for(op.key));
    co_await acquiring;
    switch (op.kind) {
      case OpKind::Read: {
        auto hit = cache.lookup(key_for(op.key));
        if (hit) op.observed = hit->origin;
        break;
      }
      case OpKind::Write: {
        CacheEntry e;
        e.origin = op.value;
        cache.insert(key_for(op.key), std::move(e));
        break;
      }
      case OpKind::Expire: cache.expire(key_for(op.key)); break;
    }
    for (int i = 0; i < op.yields; ++i) {
      auto hold = sched.yield();
      co_await hold;
    }
    locks.release(key_for(op.key));
    op.returned = clock++;
  }
}

using Register = std::map<int, std::optional<std::string>>;

// Sequential specification: a map from key to the last written value, where
// expiry hides the value.
inline bool apply(Register& reg, const Op& op) {
  switch (op.kind) {
    case OpKind::Read: return reg[op.key] == op.observed;
    case OpKind::Write: reg[op.key] = op.value; return true;
    case OpKind::Expire: reg[op.key].reset(); return true;
  }
  return false;
}

// Searches merges of the two program orders that respect real-time order
// and explain every read plus the final state.
inline bool linearizable(const std::vector<Op>& a, const std::vector<Op>& b, std::size_t i, std::size_t j,
                  Register reg, const Register& final_state) {
  if (i == a.size() && j == b.size()) {
    for (const auto& [k, v] : final_state) {
      if (reg[k] != v) return false;
    }
    return true;
  }
  auto may_go_first = [](const Op& op, const std::vector<Op>& other, std::size_t from) {
    for (std::size_t k = from; k < other.size(); ++k) {
      if (other[k].returned < op.invoked) return false;
    }
    return true;
  };
  if (i < a.size() && may_go_first(a[i], b, j)) {
    Register next = reg;
    if (apply(next, a[i]) && linearizable(a, b, i + 1, j, next, final_state)) return true;
  }
  if (j < b.size() && may_go_first(b[j], a, i)) {
    Register next = reg;
    if (apply(next, b[j]) && linearizable(a, b, i, j + 1, next, final_state)) return true;
  }
  return false;
}

inline std::vector<Op> random_ops(std::mt19937_64& rng, int writer) {
  std::uniform_int_distribution<int> count(1, 4), kind(0, 5), key(0, 1), yields(0, 2);
  std::vector<Op> ops(static_cast<std::size_t>(count(rng)));
  int serial = 0;
  for (auto& op : ops) {
    const int k = kind(rng);
    op.kind = k < 3 ? OpKind::Write : k < 5 ? OpKind::Read : OpKind::Expire;
    op.key = key(rng);
    op.value = "w" + std::to_string(writer) + "." + std::to_string(serial++);
    op.yields = yields(rng);
  }
  return ops;
}

// ---------------------------------------------------------------- random zones

struct RandomZone {
  Zone zone;
  std::string text;
  std::vector<DomainName> owners;  // every owner, glue included
  std::vector<DomainName> cuts;
};

inline bool wildcard_only_leftmost(const DomainName& n) {
  const auto& labels = n.labels();
  for (std::size_t i = 1; i < labels.size(); ++i) {
    if (labels[i] == "*") return false;
  }
  return true;
}

inline RandomZone random_zone(testing::NameGen& gen, bool with_delegations) {
  const DomainName apex = parse_name("example");
  RandomZone rz{Zone(apex), "$ORIGIN example\nexample A IP_ADDR\n", {apex}, {}};
  rz.zone.add(ResourceRecord{apex, AData{"IP_ADDR"}});
  std::uniform_int_distribution<int> size(0, 31), coin(0, 5);
  for (int i = size(gen.rng()); i > 0; --i) {
    const DomainName n = gen.below(apex);
    if (!wildcard_only_leftmost(n)) continue;
    if (with_delegations && coin(gen.rng()) == 0 && n.labels().front() != "*") {
      rz.zone.add(ResourceRecord{n, NsData{n.child("ns")}});
      rz.zone.add(ResourceRecord{n.child("ns"), AData{"IP_ADDR"}});
      rz.owners.push_back(n);
      rz.owners.push_back(n.child("ns"));
      rz.cuts.push_back(n);
    } else {
      rz.zone.add(ResourceRecord{n, AData{"IP_ADDR"}});
      rz.text += n.to_string() + " A IP_ADDR\n";
      rz.owners.push_back(n);
    }
  }
  return rz;
}

inline bool strictly_below(const DomainName& n, const DomainName& cut) {
  const auto& a = n.labels();
  const auto& b = cut.labels();
  return a.size() > b.size() && std::equal(b.rbegin(), b.rend(), a.rbegin());
}

// Owners that are not glue, in the reference canonical order.
inline std::vector<DomainName> reference_nsec_owners(const RandomZone& rz) {
  std::vector<DomainName> names;
  for (const auto& o : rz.owners) {
    bool glue = std::any_of(rz.cuts.begin(), rz.cuts.end(), [&](const DomainName& c) { return strictly_below(o, c); });
    if (!glue) names.push_back(o);
  }
  std::sort(names.begin(), names.end(), testing::reference_less);
  names.erase(std::unique(names.begin(), names.end()), names.end());
  return names;
}

// Non-glue owners plus every ancestor strictly between them and the apex.
inline std::vector<DomainName> reference_existing(const RandomZone& rz) {
  std::vector<DomainName> out;
  for (const auto& n : reference_nsec_owners(rz)) {
    std::vector<std::string> labels = n.labels();
    while (labels.size() >= 1) {
      std::string text;
      for (const auto& l : labels) text += l + ".";
      out.push_back(parse_name(text));
      if (labels.size() == 1) break;
      labels.erase(labels.begin());
    }
  }
  std::sort(out.begin(), out.end(), testing::reference_less);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Iterated SHA-1 over the lower-cased wire form, rendered in base32hex,
// written against libcrypto directly.
inline std::string reference_hash(const DomainName& n, const std::string& salt_hex, int iterations) {
  std::string wire;
  for (const auto& label : n.labels()) {
    wire += static_cast<char>(label.size());
    for (char c : label) wire += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  wire += '\0';
  std::string salt;
  for (std::size_t i = 0; i + 1 < salt_hex.size(); i += 2) {
    salt += static_cast<char>(std::stoi(salt_hex.substr(i, 2), nullptr, 16));
  }
  auto sha1 = [](const std::string& in) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(in.data(), in.size(), md, &len, EVP_sha1(), nullptr);
    return std::string(reinterpret_cast<char*>(md), len);
  };
  std::string digest = sha1(wire + salt);
  for (int i = 0; i < iterations; ++i) digest = sha1(digest + salt);

  static const char alphabet[] = "0123456789abcdefghijklmnopqrstuv";
  std::string out;
  std::uint64_t buffer = 0;
  int bits = 0;
  for (unsigned char c : digest) {
    buffer = (buffer << 8) | c;
    bits += 8;
    while (bits >= 5) {
      out += alphabet[(buffer >> (bits - 5)) & 31];
      bits -= 5;
    }
  }
  if (bits > 0) out += alphabet[(buffer << (5 - bits)) & 31];
  return out;
}

// ---------------------------------------------------------------- sweeps

struct LinearizabilitySweep {
  int trials = 0;
  int violations = 0;
  std::size_t distinct_lock_orders = 0;
};

/// Runs two writers over random operation lists once per seed and checks
/// each history against the sequential register.
inline LinearizabilitySweep linearizability_sweep(std::uint64_t first, int count) {
  LinearizabilitySweep out;
  std::set<std::vector<std::size_t>> lock_orders;
  for (std::uint64_t seed = first; seed < first + static_cast<std::uint64_t>(count); ++seed) {
    std::mt19937_64 rng(seed * 7919);
    std::vector<std::vector<Op>> ops{random_ops(rng, 0), random_ops(rng, 1)};
    Scheduler sched(seed);
    Trace trace;
    LockTable locks(sched, trace);
    Cache cache(locks, sched, trace);
    int clock = 0;
    for (std::size_t w = 0; w < 2; ++w) {
      sched.spawn("writer" + std::to_string(w), 0, [&, w] { return run_ops(sched, locks, cache, ops[w], clock); });
    }
    sched.run(100000);

    Register final_state;
    for (int k = 0; k < 2; ++k) {
      auto it = cache.snapshot().find(key_for(k));
      final_state[k] = std::nullopt;
      if (it != cache.snapshot().end() && it->second.status == EntryStatus::Active) final_state[k] = it->second.origin;
    }
    ++out.trials;
    if (locks.outstanding() != 0 || !linearizable(ops[0], ops[1], 0, 0, {}, final_state)) ++out.violations;

    std::vector<std::size_t> order;
    for (const auto& e : trace.events()) {
      if (e.kind == EventKind::LockAcquire) order.push_back(static_cast<std::size_t>(e.activity));
    }
    lock_orders.insert(order);
  }
  out.distinct_lock_orders = lock_orders.size();
  return out;
}

/// Number of random zones whose NSEC chain differs from the sorted owners.
inline int nsec_chain_mismatches(std::uint64_t seed, int rounds) {
  testing::NameGen gen(seed);
  int bad = 0;
  for (int round = 0; round < rounds; ++round) {
    const RandomZone rz = random_zone(gen, true);
    const auto names = reference_nsec_owners(rz);
    const Zone built = build_nsec_chain(rz.zone);
    std::map<DomainName, DomainName> next;
    for (const auto& [key, set] : built.rrsets()) {
      if (key.type == RecordType::NSEC) next.emplace(key.owner, set.records.front().as<NsecData>().next);
    }
    bool ok = next.size() == names.size();
    for (std::size_t i = 0; ok && i < names.size(); ++i) {
      auto it = next.find(names[i]);
      ok = it != next.end() && it->second == names[(i + 1) % names.size()];
    }
    bad += !ok;
  }
  return bad;
}

/// Number of random zones whose NSEC3 chain differs from the sorted hashes
/// of the existing names.
inline int nsec3_chain_mismatches(std::uint64_t seed, int rounds) {
  testing::NameGen gen(seed);
  const std::vector<Nsec3Params> params{{1, 0, ""}, {1, 0, "0021"}, {1, 3, "aabbccdd"}};
  int bad = 0;
  for (int round = 0; round < rounds; ++round) {
    const RandomZone rz = random_zone(gen, true);
    const Nsec3Params& p = params[static_cast<std::size_t>(round) % params.size()];
    std::vector<std::string> hashes;
    for (const auto& n : reference_existing(rz)) hashes.push_back(reference_hash(n, p.salt_hex, p.iterations));
    std::sort(hashes.begin(), hashes.end());
    const Zone built = build_nsec3_chain(rz.zone, p);
    bool ok = built.nsec3_rrsets().size() == hashes.size();
    for (std::size_t i = 0; ok && i < hashes.size(); ++i) {
      auto it = built.nsec3_rrsets().find(HashedLabel{hashes[i]});
      ok = it != built.nsec3_rrsets().end() &&
           it->second.records.front().as<Nsec3Data>().next_hashed.value == hashes[(i + 1) % hashes.size()] &&
           it->second.records.front().as<Nsec3Data>().params == p;
    }
    bad += !ok;
  }
  return bad;
}

}  // namespace oracles
