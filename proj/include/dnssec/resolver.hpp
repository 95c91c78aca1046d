#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "dnssec/cache.hpp"
#include "dnssec/network.hpp"
#include "dnssec/validator.hpp"

namespace dnssec {

struct ValidatedResponse {
  Response response;
  SecurityState security_state = SecurityState::Bogus;
  std::vector<std::string> proof;  // validation steps, in order
  std::string ede;                 // extended error annotation for SERVFAIL
};

/// A cache lookup that returned an entry, kept for post-run checks.
struct CacheHit {
  std::size_t seq = 0;  // the CacheLookup event
  CacheKey key;
  CacheEntry entry;
  bool cd = false;
};

struct AcceptRecord {
  std::size_t seq = 0;  // the AcceptEvent
  std::string server;
  Query query;  // the wire query whose response carried the RRset
  AcceptedRRset accepted;
};

/// Iterative validating resolver sharing one cache between its activities.
class Resolver {
 public:
  Resolver(Scheduler& sched, Trace& trace, Network& net, LockTable& locks, Cache& cache,
           TrustAnchor anchor, ResolverConfig cfg, std::string root_server);

  /// Resolves `q` from the root down. Throws ResolutionError when the
  /// delegation depth bound is exceeded or a delegation leads nowhere.
  Task<ValidatedResponse> resolve(Query q);

  const ResolverConfig& config() const { return cfg_; }
  const std::vector<CacheHit>& hits() const { return hits_; }
  const std::vector<AcceptRecord>& accepted() const { return accepted_; }

 private:
  struct Validation {
    SecurityState state = SecurityState::Bogus;
    std::string reason;
    std::vector<AcceptedRRset> accepted;
    std::optional<DenialFamily> denial;
  };
  using Validator = std::function<Validation(const Response&)>;

  struct Step {
    Response response;
    SecurityState state = SecurityState::Bogus;
    std::string reason;
    bool from_cache = false;
  };

  Task<Step> fetch(std::string server, Query q, std::uint64_t origin_qid, Validator validate);
  Task<ZoneKeys> zone_keys(std::string server, DomainName apex, std::vector<ResourceRecord> ds,
                           bool cd, std::uint64_t origin_qid);

  Validation validate_step(const Query& q, const Response& r, const ZoneKeys& keys);
  void emit_accepts(const std::string& server, const Query& q, const std::vector<AcceptedRRset>& accepted);
  Partition partition_for(bool cd) const;

  Scheduler& sched_;
  Trace& trace_;
  Network& net_;
  LockTable& locks_;
  Cache& cache_;
  TrustAnchor anchor_;
  ResolverConfig cfg_;
  std::string root_server_;
  std::map<DomainName, DenialFamily> families_;  // denial family seen per zone
  std::vector<CacheHit> hits_;
  std::vector<AcceptRecord> accepted_;
};

/// True when `r` delegates `qname` from zone `apex` to a child zone; sets
/// `cut` to the child apex.
bool is_referral(const Response& r, const DomainName& apex, const Query& q, DomainName* cut);

}  // namespace dnssec
