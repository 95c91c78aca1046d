// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "dnssec/attacks.hpp"
#include "dnssec/properties.hpp"
#include "oracles.hpp"

using namespace dnssec;

namespace {

constexpr std::uint64_t kPropertySeeds = 500;
constexpr double kSuiteSeconds = 600.0;
constexpr std::uint64_t kScenarioSeeds = 50;  // criteria 2, 4 and 5
constexpr std::size_t kWalkNames = 9;
constexpr std::size_t kWalkQueryBound = 18;
constexpr int kInterleavings = 10000;
constexpr int kRandomZones = 1000;

Scenario scenario(const std::string& name) {
  return load_scenario(std::string(FIXTURE_DIR) + "/scenarios/" + name + ".scn");
}

const ClientResult* result_for(const RunResult& run, const char* qname) {
  for (const auto& r : run.results) {
    if (r.query.qname == parse_name(qname)) return &r;
  }
  return nullptr;
}

// Criterion 7: the cache and liveness properties on every trace produced
// while checking criteria 1 to 5.
struct TraceAudit {
  std::size_t traces = 0;
  std::vector<std::string> failures;

  void add(const RunResult& run) {
    ++traces;
    CheckContext ctx{run.topology, run.config, {}, {}};
    for (int id : {4, 5, 7, 8}) {
      if (auto v = property_checkers().at(id)(run, ctx)) {
        failures.push_back("P" + std::to_string(id) + " seed " + std::to_string(run.seed) + ": " + v->message);
      }
    }
  }
  // Verdicts stop at the first violation, so a Holds verdict covers every
  // trace it explored.
  void add(const std::vector<Verdict>& verdicts) {
    for (const auto& v : verdicts) {
      if (v.id == 4 || v.id == 5 || v.id == 7 || v.id == 8) {
        traces += v.seeds_explored;
        if (v.outcome != PropertyOutcome::Holds) failures.push_back("P" + std::to_string(v.id) + " falsified");
      }
    }
  }
};

struct Line {
  bool pass = false;
  std::string detail;
};

void report(int criterion, const Line& line, bool& all) {
  std::printf("criterion %d: %s - %s\n", criterion, line.pass ? "PASS" : "FAIL", line.detail.c_str());
  std::fflush(stdout);
  all = all && line.pass;
}

Line criterion_properties(TraceAudit& audit) {
  const auto start = std::chrono::steady_clock::now();
  const SeedRange seeds{1, kPropertySeeds};
  struct Job {
    const char* scenario;
    std::vector<int> ids;
    PropertyOutcome expected;
  };
  const std::vector<Job> jobs{
      {"baseline", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 15}, PropertyOutcome::Holds},
      {"nsec3", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 16, 17, 18}, PropertyOutcome::Holds},
      {"enumeration", {14}, PropertyOutcome::Falsified},
      {"mixed-gap", {19}, PropertyOutcome::Falsified},
      {"enumeration", {4, 5, 7, 8}, PropertyOutcome::Holds},
      {"mixed-gap", {4, 5, 7, 8}, PropertyOutcome::Holds},
  };
  std::string wrong;
  std::set<int> holds, falsified;
  for (const auto& job : jobs) {
    const auto verdicts = check_properties(scenario(job.scenario), job.ids, seeds);
    audit.add(verdicts);
    for (const auto& v : verdicts) {
      const bool explored_all = v.outcome == PropertyOutcome::Falsified ||
                                property_info(v.id).quantifier == Quantifier::Existential ||
                                v.seeds_explored == kPropertySeeds;
      if (v.outcome != job.expected || !explored_all) {
        wrong += " P" + std::to_string(v.id) + "@" + job.scenario + "=" + to_string(v.outcome);
        if (v.violation) wrong += " (" + v.violation->message + ")";
      }
      (v.outcome == PropertyOutcome::Holds ? holds : falsified).insert(v.id);
    }
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Line line;
  line.pass = wrong.empty() && seconds < kSuiteSeconds;
  line.detail = std::to_string(holds.size()) + " properties Hold over " + std::to_string(kPropertySeeds) +
                " seeds, P14 and P19 Falsified, " + std::to_string(static_cast<int>(seconds)) + "s";
  if (!wrong.empty()) line.detail += "; unexpected:" + wrong;
  return line;
}

Line criterion_mixed_gap(TraceAudit& audit) {
  const Scenario s = scenario("mixed-gap");
  std::string accept_sig, servfail_sig;
  bool ok = true;
  for (std::uint64_t seed = 1; seed <= kScenarioSeeds; ++seed) {
    const auto accept = replay_mixed_gap(s, MixedDenialPolicy::Accept, seed);
    const auto refuse = replay_mixed_gap(s, MixedDenialPolicy::Servfail, seed);
    audit.add(accept.run);
    audit.add(refuse.run);
    const auto& a = accept.report;
    const auto& r = refuse.report;
    ok = ok && a.crafted_denial_accepted && a.crafted_denial_cached && a.direct_query_answered;
    ok = ok && r.crafted_denial_servfail && !r.crafted_denial_cached && r.nsec3_denial_entries == 0;
    if (seed == 1) {
      accept_sig = a.text;
      servfail_sig = r.text;
    }
    ok = ok && a.text == accept_sig && r.text == servfail_sig;
  }
  return {ok, "Accept caches the crafted NSEC3 denial and answers c.example; Servfail refuses it and caches "
              "nothing; identical reports over " + std::to_string(kScenarioSeeds) + " seeds"};
}

Line criterion_enumeration(TraceAudit& audit) {
  const DomainName apex = parse_name("example");
  Scenario nsec = enumeration_scenario(scenario("enumeration"), apex, kWalkQueryBound);
  const RunResult walked = run_scenario(nsec, 1);
  audit.add(walked);

  Scenario hashed = nsec;
  const Scenario n3 = scenario("nsec3");
  for (auto& z : hashed.zones) {
    z.chain = ChainKind::Nsec3;
    z.nsec3 = n3.zones.back().nsec3;
  }
  const RunResult blocked = run_scenario(hashed, 1);
  audit.add(blocked);

  const std::size_t names = walked.enumeration ? walked.enumeration->names.size() : 0;
  const std::size_t queries = walked.enumeration ? walked.enumeration->queries : 0;
  const std::size_t hashed_names = blocked.enumeration ? blocked.enumeration->names.size() : 0;
  const bool ok = walked.completed && names == kWalkNames && queries <= kWalkQueryBound && blocked.completed &&
                  blocked.enumeration && blocked.enumeration->blocked && hashed_names == 0;
  return {ok, "NSEC walk recovered " + std::to_string(names) + " names in " + std::to_string(queries) +
                  " queries; NSEC3 walk recovered " + std::to_string(hashed_names)};
}

Line criterion_downgrade(TraceAudit& audit) {
  Scenario permissive = scenario("downgrade");
  permissive.resolver.downgrade_policy = DowngradePolicy::Permissive;
  Scenario strict = permissive;
  strict.resolver.downgrade_policy = DowngradePolicy::Strict;
  bool ok = true;
  for (std::uint64_t seed = 1; seed <= kScenarioSeeds; ++seed) {
    const RunResult p = run_scenario(permissive, seed);
    const RunResult s = run_scenario(strict, seed);
    audit.add(p);
    audit.add(s);
    const ClientResult* pr = result_for(p, "ai.example");
    const ClientResult* sr = result_for(s, "ai.example");
    ok = ok && pr && pr->result.security_state == SecurityState::Insecure && pr->result.response.rcode == Rcode::NoError;
    ok = ok && sr && sr->result.response.rcode == Rcode::ServFail;
  }
  return {ok, "supported {8}, signatures rewritten to 16: Permissive gives Insecure, Strict gives SERVFAIL"};
}

Line criterion_ruc(TraceAudit& audit) {
  Scenario unified = scenario("ruc");
  unified.resolver.cache_partitioning = CachePartitioning::Unified;
  Scenario split = unified;
  split.resolver.cache_partitioning = CachePartitioning::ByValidationState;
  bool ok = true;
  for (std::uint64_t seed = 1; seed <= kScenarioSeeds; ++seed) {
    const RunResult u = run_scenario(unified, seed);
    const RunResult s = run_scenario(split, seed);
    audit.add(u);
    audit.add(s);
    const ClientResult* ur = result_for(u, "ai.example");
    const ClientResult* sr = result_for(s, "ai.example");
    ok = ok && ur && ur->result.security_state == SecurityState::Bogus && ur->result.response.rcode == Rcode::ServFail;
    ok = ok && sr && sr->result.security_state == SecurityState::Secure;
    ok = ok && run_scenario(unified, seed).trace.dump() == u.trace.dump();
  }
  return {ok, "Unified gives Bogus/SERVFAIL, ByValidationState gives Secure, traces reproducible per seed"};
}

Line criterion_oracles() {
  const auto sweep = oracles::linearizability_sweep(1, kInterleavings);
  const int nsec = oracles::nsec_chain_mismatches(77, kRandomZones);
  const int nsec3 = oracles::nsec3_chain_mismatches(78, kRandomZones);
  const bool ok = sweep.trials == kInterleavings && sweep.violations == 0 && nsec == 0 && nsec3 == 0;
  return {ok, std::to_string(sweep.violations) + " linearizability violations in " + std::to_string(sweep.trials) +
                  " interleavings; chain mismatches NSEC " + std::to_string(nsec) + ", NSEC3 " +
                  std::to_string(nsec3) + " over " + std::to_string(kRandomZones) + " zones each"};
}

}  // namespace

int main() {
  try {
    bool all = true;
    TraceAudit audit;
    report(1, criterion_properties(audit), all);
    report(2, criterion_mixed_gap(audit), all);
    report(3, criterion_enumeration(audit), all);
    report(4, criterion_downgrade(audit), all);
    report(5, criterion_ruc(audit), all);
    report(6, criterion_oracles(), all);
    Line seven{audit.failures.empty() && audit.traces > 0,
               "P4, P5, P7 and P8 checked on " + std::to_string(audit.traces) + " traces"};
    if (!audit.failures.empty()) seven.detail += "; first failure: " + audit.failures.front();
    report(7, seven, all);
    return all ? 0 : 1;
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 1;
  }
}
