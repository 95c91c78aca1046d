#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dnssec/adversary.hpp"
#include "dnssec/network.hpp"
#include "dnssec/resolver.hpp"

namespace dnssec {

enum class ChainKind : std::uint8_t { Nsec, Nsec3, Mixed };

struct ZoneSpec {
  std::string server;
  std::string zone_text;
  std::string source;  // file name, for diagnostics
  ChainKind chain = ChainKind::Nsec;
  Nsec3Params nsec3{1, 0, ""};
  ChainAssignment assignment;
  std::vector<AlgorithmId> algorithms{AlgorithmId{8}};
  ServerMode mode = ServerMode::Honest;
};

struct ClientSpec {
  std::string name;
  int phase = 0;
  std::vector<Query> queries;
};

struct AttackerSpec {
  std::string kind;  // Passive, MitmDowngrade, RucInjector, RandomTamper
  double rate = 0.0;
  AlgorithmId target_algorithm{16};
  DomainName victim;
};

struct EnumerationSpec {
  DomainName apex;
  std::size_t budget = 64;
  int phase = 0;
};

enum class Expectation : std::uint8_t { Holds, Falsified };
const char* to_string(Expectation e);

struct Scenario {
  std::string name;
  std::uint64_t seed = 1;
  std::uint64_t first_seed = 1;
  std::uint64_t seed_count = 500;
  std::size_t step_budget = 10000;
  ResolverConfig resolver;
  DeliveryMode channel_mode = DeliveryMode::Adversarial;
  std::vector<ZoneSpec> zones;
  std::vector<ClientSpec> clients;
  std::vector<AttackerSpec> attackers;
  std::optional<EnumerationSpec> enumeration;
  std::map<int, Expectation> expect;
};

/// Validates `doc` against the scenario schema; zone files are resolved
/// relative to `base_dir`. Throws ScenarioError listing every violation.
Scenario parse_scenario(const std::string& json_text, const std::filesystem::path& base_dir);
Scenario load_scenario(const std::filesystem::path& path);

/// Signed zones, built leaf-first so every parent publishes its child's DS.
struct Topology {
  std::vector<NameServer> servers;
  TrustAnchor anchor;
  std::string root_server;
  NameSet hosted_names;  // authoritative names of every zone
  NameSet secret_names;  // hosted names that are neither apexes nor rdata targets

  const NameServer* server_for(const DomainName& apex) const;
};

Topology build_topology(const Scenario& s);

struct ClientResult {
  std::string client;
  Query query;
  ValidatedResponse result;
  std::size_t seq = 0;  // the ClientResponse event
};

struct EnumerationResult {
  NameSet names;
  std::set<std::string> hashes;
  std::size_t queries = 0;
  bool blocked = false;
};

struct RunResult {
  std::uint64_t seed = 0;
  Trace trace;
  bool completed = false;
  std::string failure;
  std::shared_ptr<const Topology> topology;
  ResolverConfig config;
  std::vector<CacheHit> hits;
  std::vector<AcceptRecord> accepted;
  std::vector<ClientResult> results;
  std::map<CacheKey, CacheEntry> cache;
  std::size_t outstanding_locks = 0;
  std::size_t scheduler_steps = 0;
  KnowledgeSet knowledge;
  std::optional<EnumerationResult> enumeration;
};

/// Runs every client, attacker and enumeration activity of `s` under one
/// seeded scheduler. Liveness failures are recorded, not thrown.
RunResult run_scenario(const Scenario& s, std::uint64_t seed);
RunResult run_scenario(const Scenario& s, std::uint64_t seed,
                       std::shared_ptr<const Topology> topology);

using Endpoint = std::function<Task<ValidatedResponse>(Query)>;

/// Walks an NSEC chain through `resolve` by asking for names just past each
/// owner learned so far. Stops as soon as NSEC3 records show up.
Task<EnumerationResult> enumerate_zone(Endpoint resolve, DomainName apex, std::size_t budget);

}  // namespace dnssec
