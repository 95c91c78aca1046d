#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dnssec/crypto.hpp"
#include "dnssec/record.hpp"
#include "dnssec/scheduler.hpp"
#include "dnssec/term.hpp"
#include "dnssec/trace.hpp"

namespace dnssec {

inline constexpr const char* kAdversaryRole = "adversary";

/// Terms the adversary has observed, closed under projection of tuples and
/// extraction of signed payloads. Synthesis (pairing, pk, h, sign, fresh
/// values of its own, public names) is decided on demand by derivable().
///
/// Zone names listed as secret are private constants: the adversary holds
/// one only after seeing it in clear, or a name below it (parents are a
/// public function of a name).
class KnowledgeSet {
 public:
  explicit KnowledgeSet(NameSet secret_names = {}) : secret_(std::move(secret_names)) {}

  /// Adds `t` and its analysis; returns names that became known.
  std::vector<DomainName> observe(const Term& t);

  bool derivable(const Term& t) const;
  /// True iff `name` was seen in clear (or is an ancestor of a name seen).
  bool knows(const DomainName& name) const;

  bool is_secret(const DomainName& name) const { return secret_.contains(name); }
  const std::set<Term>& analyzed() const { return analyzed_; }
  const NameSet& names() const { return names_; }

 private:
  bool derivable_name(const DomainName& n) const;

  NameSet secret_;
  std::set<Term> analyzed_;
  NameSet names_;  // every name term in analyzed_, plus their ancestors
};

enum class DeliveryMode : std::uint8_t { Honest, Adversarial };

struct Channel {
  std::string from;
  std::string to;
  DeliveryMode mode = DeliveryMode::Adversarial;
};

class Adversary;

/// What a script may use: the adversary's knowledge, its own fresh values
/// and the scheduler's random choices.
struct AttackContext {
  KnowledgeSet& knowledge;
  FreshSource& fresh;
  Scheduler& sched;
};

class AttackerScript {
 public:
  virtual ~AttackerScript() = default;
  virtual std::string kind() const = 0;
  /// Replacement for an intercepted response, or nullopt to forward it.
  /// The second element describes the action for the trace.
  virtual std::optional<std::pair<Response, std::string>> on_response(AttackContext& ctx,
                                                                      const Channel& ch,
                                                                      const Query& q,
                                                                      const Response& r) = 0;
};

/// Observes and forwards everything.
class PassiveScript final : public AttackerScript {
 public:
  std::string kind() const override { return "Passive"; }
  std::optional<std::pair<Response, std::string>> on_response(AttackContext&, const Channel&,
                                                              const Query&,
                                                              const Response&) override {
    return std::nullopt;
  }
};

/// Rewrites the algorithm field of the signatures in dual-algorithm RRsets
/// so that every signature claims `target`.
class MitmDowngradeScript final : public AttackerScript {
 public:
  explicit MitmDowngradeScript(AlgorithmId target) : target_(target) {}
  std::string kind() const override { return "MitmDowngrade"; }
  std::optional<std::pair<Response, std::string>> on_response(AttackContext& ctx, const Channel& ch,
                                                              const Query& q,
                                                              const Response& r) override;

 private:
  AlgorithmId target_;
};

/// Answers CD=1 DNSKEY queries for `victim` with a fresh unsigned key.
class RucInjectorScript final : public AttackerScript {
 public:
  explicit RucInjectorScript(DomainName victim) : victim_(std::move(victim)) {}
  std::string kind() const override { return "RucInjector"; }
  std::optional<std::pair<Response, std::string>> on_response(AttackContext& ctx, const Channel& ch,
                                                              const Query& q,
                                                              const Response& r) override;

 private:
  DomainName victim_;
};

/// With probability `rate` per response applies one of: DNSKEY key
/// substitution, DS digest rewrite, a forged RRSIG, deletion of an answer
/// record, or replay of an earlier positive response to the same question.
class RandomTamperScript final : public AttackerScript {
 public:
  explicit RandomTamperScript(double rate) : rate_(rate) {}
  std::string kind() const override { return "RandomTamper"; }
  std::optional<std::pair<Response, std::string>> on_response(AttackContext& ctx, const Channel& ch,
                                                              const Query& q,
                                                              const Response& r) override;

 private:
  double rate_;
  std::vector<std::pair<std::pair<DomainName, RecordType>, Response>> seen_;
};

/// The Dolev-Yao network adversary sitting on adversarial channels.
class Adversary {
 public:
  Adversary(Scheduler& sched, Trace& trace, NameSet secret_names)
      : sched_(sched), trace_(trace), knowledge_(std::move(secret_names)) {}

  void add_script(std::unique_ptr<AttackerScript> script) { scripts_.push_back(std::move(script)); }
  bool has_scripts() const { return !scripts_.empty(); }

  /// Observes a query on `ch`.
  void intercept_query(const Channel& ch, const Query& q);
  /// Observes a response and withholds it; scripts then decide what is
  /// delivered, which goes through inject().
  Response intercept(const Channel& ch, const Query& q, const Response& r);
  /// Throws DerivabilityError unless `msg` is derivable from knowledge.
  void inject(const Channel& ch, const Response& msg, const std::string& action);

  const KnowledgeSet& knowledge() const { return knowledge_; }
  FreshSource& fresh() { return fresh_; }

 private:
  void learn(const Term& t, const Channel& ch);

  Scheduler& sched_;
  Trace& trace_;
  KnowledgeSet knowledge_;
  FreshSource fresh_;
  std::vector<std::unique_ptr<AttackerScript>> scripts_;
};

Term query_term(const Query& q);

}  // namespace dnssec
