#include "dnssec/attacks.hpp"

#include <algorithm>
#include <sstream>

namespace dnssec {

Scenario enumeration_scenario(const Scenario& s, const DomainName& apex, std::size_t budget) {
  Scenario out = s;
  out.clients.clear();
  out.attackers.clear();
  out.attackers.push_back(AttackerSpec{"Passive", 0.0, AlgorithmId{16}, DomainName()});
  out.resolver.expiry_probability = 0.0;
  out.enumeration = EnumerationSpec{apex, budget, 0};
  return out;
}

EnumerationResult enumerate(const Scenario& s, const DomainName& apex, std::size_t budget, std::uint64_t seed) {
  const RunResult run = run_scenario(enumeration_scenario(s, apex, budget), seed);
  if (!run.completed) throw ScenarioError("enumeration run failed: " + run.failure);
  const EnumerationResult& result = *run.enumeration;
  if (result.blocked) {
    throw EnumerationBlocked("enumeration blocked: " + apex.to_string() + " answers with NSEC3 (" +
                             std::to_string(result.hashes.size()) + " hashes learned)");
  }
  return result;
}

MixedGapReplay replay_mixed_gap(Scenario s, MixedDenialPolicy policy, std::uint64_t seed) {
  s.resolver.mixed_denial_policy = policy;
  MixedGapReplay out{run_scenario(s, seed), {}};
  const RunResult& run = out.run;
  MixedGapReport& rep = out.report;
  if (run.results.size() != 3) throw ScenarioError("the mixed-gap replay needs exactly three client queries");
  const ClientResult& probe = run.results[0];
  const ClientResult& crafted = run.results[1];
  const ClientResult& direct = run.results[2];

  for (const auto& [key, entry] : run.cache) {
    if (!entry.denial) continue;
    (*entry.denial == DenialFamily::Nsec ? rep.nsec_denial_entries : rep.nsec3_denial_entries) += 1;
    if (key.owner == probe.query.qname && entry.denial == DenialFamily::Nsec) rep.nsec_denial_cached = true;
    if (key.owner == crafted.query.qname && entry.denial == DenialFamily::Nsec3) rep.crafted_denial_cached = true;
  }
  rep.crafted_denial_accepted = crafted.result.security_state == SecurityState::Secure &&
                                crafted.result.response.rcode == Rcode::NxDomain;
  rep.crafted_denial_servfail = crafted.result.response.rcode == Rcode::ServFail;
  rep.direct_query_answered = direct.result.security_state == SecurityState::Secure &&
                              direct.result.response.rcode == Rcode::NoError &&
                              std::any_of(direct.result.response.answer.begin(), direct.result.response.answer.end(),
                                          [&](const ResourceRecord& rr) {
                                            return rr.owner == direct.query.qname && rr.type() == RecordType::A;
                                          });

  std::ostringstream text;
  auto line = [&](int step, const ClientResult& r, const std::string& note) {
    text << step << ". " << r.query.qname.to_string() << " " << to_string(r.query.qtype) << " -> "
         << to_string(r.result.response.rcode) << " " << to_string(r.result.security_state)
         << (r.result.ede.empty() ? "" : " (" + r.result.ede + ")") << "; " << note << "\n";
  };
  line(1, probe, rep.nsec_denial_cached ? "NSEC denial cached" : "NSEC denial not cached");
  line(2, crafted, rep.crafted_denial_cached ? "crafted NSEC3 denial cached" : "crafted NSEC3 denial not cached");
  line(3, direct, rep.direct_query_answered ? "answered correctly" : "not answered");
  text << "cache census: " << rep.nsec_denial_entries << " NSEC denial, " << rep.nsec3_denial_entries
       << " NSEC3 denial\n";
  rep.text = text.str();
  return out;
}

}  // namespace dnssec
