// Command-line front end: property checks, zone walking, trace dumps,
// mixed-denial replays and zone signing.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "dnssec/attacks.hpp"
#include "dnssec/errors.hpp"
#include "dnssec/properties.hpp"
#include "dnssec/scenario.hpp"
#include "dnssec/zone.hpp"

using namespace dnssec;

namespace {

constexpr int kExpectationsMet = 0;
constexpr int kDeviation = 1;
constexpr int kUsageError = 2;

struct CheckOptions {
  std::string scenario;
  std::string props;
  std::string seeds;
  std::string report;
  std::string format = "table";
};

int cmd_check(const CheckOptions& o) {
  const Scenario s = load_scenario(o.scenario);
  std::vector<int> ids;
  if (!o.props.empty()) {
    ids = parse_property_list(o.props);
  } else if (!s.expect.empty()) {
    for (const auto& [id, e] : s.expect) ids.push_back(id);
  } else {
    for (const auto& p : property_catalog()) ids.push_back(p.id);
  }
  const SeedRange seeds = o.seeds.empty() ? SeedRange{s.first_seed, s.seed_count} : parse_seed_range(o.seeds);
  const ReportFormat format = o.format == "json-lines" ? ReportFormat::JsonLines : ReportFormat::Table;

  const std::vector<Verdict> verdicts = check_properties(s, ids, seeds);
  std::map<int, std::string> trace_paths;
  if (!o.report.empty()) {
    for (const auto& v : verdicts) {
      if (v.counterexample_trace.empty()) continue;
      const std::string path = o.report + ".p" + std::to_string(v.id) + ".trace";
      std::ofstream(path) << v.counterexample_trace;
      trace_paths[v.id] = path;
    }
  }
  const std::string report = format_report(verdicts, s.expect, format, trace_paths);
  std::cout << report;
  if (!o.report.empty()) {
    std::ofstream out(o.report);
    if (!out) throw ScenarioError("cannot write report " + o.report);
    out << report;
  }

  bool met = true;
  for (const auto& v : verdicts) {
    auto it = s.expect.find(v.id);
    if (it == s.expect.end()) continue;
    met = met && ((it->second == Expectation::Holds) == (v.outcome == PropertyOutcome::Holds));
  }
  return met ? kExpectationsMet : kDeviation;
}

int cmd_enumerate(const std::string& path, const std::string& apex_text, std::size_t budget, std::uint64_t seed) {
  const Scenario s = load_scenario(path);
  DomainName apex;
  if (!apex_text.empty()) {
    apex = parse_name(apex_text);
  } else if (s.enumeration) {
    apex = s.enumeration->apex;
  } else {
    throw ScenarioError("no --apex given and the scenario names no enumeration target");
  }
  const EnumerationResult r = enumerate(s, apex, budget, seed);
  for (const auto& n : r.names) std::cout << n.to_string() << "\n";
  std::cerr << r.names.size() << " names in " << r.queries << " queries\n";
  return kExpectationsMet;
}

int cmd_trace(const std::string& path, std::optional<std::uint64_t> seed) {
  const Scenario s = load_scenario(path);
  const RunResult run = run_scenario(s, seed.value_or(s.seed));
  std::cout << run.trace.dump();
  for (const auto& r : run.results) {
    std::cout << "result " << r.client << " " << r.query.qname.to_string() << " " << to_string(r.query.qtype)
              << (r.query.cd ? " cd" : "") << " -> " << to_string(r.result.response.rcode) << " "
              << to_string(r.result.security_state) << (r.result.ede.empty() ? "" : " (" + r.result.ede + ")")
              << "\n";
  }
  if (!run.completed) {
    std::cout << "incomplete: " << run.failure << "\n";
    return kDeviation;
  }
  return kExpectationsMet;
}

int cmd_replay(const std::string& path, const std::string& policy, std::uint64_t seed) {
  const Scenario s = load_scenario(path);
  const MixedDenialPolicy p = policy == "Servfail" ? MixedDenialPolicy::Servfail : MixedDenialPolicy::Accept;
  const MixedGapReplay replay = replay_mixed_gap(s, p, seed);
  std::cout << replay.report.text;
  return kExpectationsMet;
}

int cmd_zone(const std::string& path, const std::string& chain, const std::string& salt, int iterations) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot read " + path);
  std::stringstream text;
  text << in.rdbuf();
  Zone z = strip_dnssec(load_zone(text.str()));
  const Nsec3Params params{1, iterations, salt};
  z = chain == "nsec3" ? build_nsec3_chain(std::move(z), params) : build_nsec_chain(std::move(z));
  FreshSource fresh;
  const std::string owner = z.apex().to_string();
  const SignedZone signed_zone = sign_zone(std::move(z), generate_key(fresh, owner, KeyRole::Zsk, AlgorithmId{8}),
                                           generate_key(fresh, owner, KeyRole::Ksk, AlgorithmId{8}));
  auto print = [](const RRSet& set) {
    for (const auto& rr : set.records) std::cout << to_string(rr) << "\n";
    for (const auto& rr : set.rrsigs) std::cout << to_string(rr) << "\n";
  };
  for (const auto& [key, set] : signed_zone.zone().rrsets()) print(set);
  for (const auto& [hash, set] : signed_zone.zone().nsec3_rrsets()) print(set);
  return kExpectationsMet;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symbolic DNSSEC resolver simulator"};
  app.require_subcommand(1);

  CheckOptions check;
  auto* c = app.add_subcommand("check", "check properties over a seed range");
  c->add_option("scenario", check.scenario, "scenario file")->required()->check(CLI::ExistingFile);
  c->add_option("--props", check.props, "property ids, e.g. 1-12,15");
  c->add_option("--seeds", check.seeds, "seed range, e.g. 1-500");
  c->add_option("--report", check.report, "write the report (and counterexample traces) to this path");
  c->add_option("--format", check.format, "report format")->check(CLI::IsMember({"table", "json-lines"}));

  std::string scenario_path;
  std::string apex;
  std::size_t budget = 64;
  std::uint64_t seed = 1;
  auto* e = app.add_subcommand("enumerate", "walk a zone's NSEC chain through the resolver");
  e->add_option("scenario", scenario_path, "scenario file")->required()->check(CLI::ExistingFile);
  e->add_option("--apex", apex, "zone to walk (default: the scenario's enumeration target)");
  e->add_option("--budget", budget, "query budget")->check(CLI::PositiveNumber);
  e->add_option("--seed", seed, "scheduler seed");

  std::optional<std::uint64_t> trace_seed;
  auto* t = app.add_subcommand("trace", "dump the event trace of one run");
  t->add_option("scenario", scenario_path, "scenario file")->required()->check(CLI::ExistingFile);
  t->add_option("--seed", trace_seed, "scheduler seed (default: the scenario's seed)");

  std::string policy = "Accept";
  auto* r = app.add_subcommand("replay", "replay the mixed NSEC/NSEC3 denial gap");
  r->add_option("scenario", scenario_path, "mixed-gap scenario file")->required()->check(CLI::ExistingFile);
  r->add_option("--policy", policy, "mixed denial policy")->check(CLI::IsMember({"Accept", "Servfail"}));
  r->add_option("--seed", seed, "scheduler seed");

  std::string zone_path;
  std::string chain = "nsec";
  std::string salt;
  int iterations = 0;
  auto* z = app.add_subcommand("zone", "load, chain and sign a zone file");
  z->add_option("zonefile", zone_path, "zone file")->required()->check(CLI::ExistingFile);
  z->add_option("--chain", chain, "denial chain")->check(CLI::IsMember({"nsec", "nsec3"}));
  z->add_option("--salt", salt, "NSEC3 salt in hex");
  z->add_option("--iterations", iterations, "NSEC3 iterations");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& ok) {
    return app.exit(ok);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return kUsageError;
  }

  try {
    if (*c) return cmd_check(check);
    if (*e) return cmd_enumerate(scenario_path, apex, budget, seed);
    if (*t) return cmd_trace(scenario_path, trace_seed);
    if (*r) return cmd_replay(scenario_path, policy, seed);
    if (*z) return cmd_zone(zone_path, chain, salt, iterations);
  } catch (const EnumerationBlocked& err) {
    std::cerr << err.what() << "\n";
    return kDeviation;
  } catch (const ScenarioError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kUsageError;
  } catch (const ContractViolation& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kUsageError;
  } catch (const ZoneParseError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kUsageError;
  } catch (const ParseError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kUsageError;
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kDeviation;
  }
  return kUsageError;
}
