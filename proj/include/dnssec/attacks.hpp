#pragma once

#include <cstdint>
#include <string>

#include "dnssec/errors.hpp"
#include "dnssec/scenario.hpp"

namespace dnssec {

class EnumerationBlocked : public Error {
 public:
  using Error::Error;
};

/// The scenario's topology with a single NSEC walker and no clients. Only
/// passive observation remains of the scenario's attackers.
Scenario enumeration_scenario(const Scenario& s, const DomainName& apex, std::size_t budget);

/// Walks the NSEC chain of `apex` through the resolver. Throws
/// EnumerationBlocked when the zone answers with NSEC3.
EnumerationResult enumerate(const Scenario& s, const DomainName& apex, std::size_t budget, std::uint64_t seed);

/// Observations of the mixed NSEC/NSEC3 replay: an NSEC denial between
/// a.example and b.example, the crafted NSEC3 denial from b.example, and a
/// direct query for c.example.
struct MixedGapReport {
  bool nsec_denial_cached = false;
  bool crafted_denial_accepted = false;
  bool crafted_denial_cached = false;
  bool crafted_denial_servfail = false;
  bool direct_query_answered = false;
  std::size_t nsec_denial_entries = 0;
  std::size_t nsec3_denial_entries = 0;
  std::string text;
};

struct MixedGapReplay {
  RunResult run;
  MixedGapReport report;
};

/// Runs the mixed-gap scenario under `policy`. The scenario must query, in
/// order, a name between a.example and b.example, bad.example and c.example.
MixedGapReplay replay_mixed_gap(Scenario s, MixedDenialPolicy policy, std::uint64_t seed);

}  // namespace dnssec
