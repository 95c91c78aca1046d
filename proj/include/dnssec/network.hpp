#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "dnssec/adversary.hpp"
#include "dnssec/scheduler.hpp"
#include "dnssec/trace.hpp"
#include "dnssec/zone.hpp"

namespace dnssec {

inline constexpr const char* kResolverRole = "resolver";

struct NameServer {
  std::string id;
  SignedZone zone;
  ServerMode mode = ServerMode::Honest;
};

/// Authoritative servers and the resolver-to-server channels. Each exchange
/// is a sequence of scheduler decision points:
///   ResolverQuery, [adversary sees query], ServerSend,
///   [adversary may replace the response], ResolverReceive.
class Network {
 public:
  Network(Scheduler& sched, Trace& trace, Adversary* adversary,
          DeliveryMode mode = DeliveryMode::Adversarial)
      : sched_(sched), trace_(trace), adversary_(adversary), mode_(mode) {}

  const NameServer& add_server(NameServer server);
  const NameServer& server(const std::string& id) const;
  /// Server authoritative for the zone with apex `apex`, if any.
  const NameServer* server_for(const DomainName& apex) const;
  const std::vector<std::unique_ptr<NameServer>>& servers() const { return servers_; }

  std::uint64_t next_qid() { return ++qid_; }

  Task<Response> exchange(std::string server_id, Query q, std::uint64_t origin_qid);

  std::size_t messages_sent() const { return messages_; }

 private:
  Scheduler& sched_;
  Trace& trace_;
  Adversary* adversary_;
  DeliveryMode mode_;
  std::vector<std::unique_ptr<NameServer>> servers_;
  std::map<std::string, NameServer*> by_id_;
  std::map<DomainName, NameServer*> by_apex_;
  std::uint64_t qid_ = 0;
  std::size_t messages_ = 0;
};

/// Response as the honest server would produce it, minus the additional
/// section (the form a cache keeps).
Response normalized(Response r);

}  // namespace dnssec
