#include "dnssec/adversary.hpp"

#include <algorithm>
#include <map>

#include "dnssec/errors.hpp"
#include "dnssec/zone.hpp"

namespace dnssec {

Term query_term(const Query& q) {
  return Term::tuple({Term::atom("query"), Term::name(q.qname), Term::atom(to_string(q.qtype)),
                      Term::atom(q.cd ? "CD1" : "CD0"), Term::atom("qid" + std::to_string(q.qid))});
}

// ---------------------------------------------------------------- knowledge

std::vector<DomainName> KnowledgeSet::observe(const Term& t) {
  std::vector<DomainName> learned;
  std::vector<Term> work{t};
  while (!work.empty()) {
    Term cur = work.back();
    work.pop_back();
    if (!analyzed_.insert(cur).second) continue;
    switch (cur.kind()) {
      case TermKind::Name: {
        DomainName n = parse_name(cur.symbol());
        while (names_.insert(n).second) {
          learned.push_back(n);
          if (n.is_root()) break;
          n = n.parent();
        }
        break;
      }
      case TermKind::App:
        if (cur.is_app("tuple")) {
          for (const auto& a : cur.args()) work.push_back(a);
        } else if (cur.is_app("sign") && !cur.args().empty()) {
          work.push_back(cur.args()[0]);  // signatures do not hide their payload
        }
        break;
      case TermKind::Atom:
      case TermKind::Fresh:
        break;
    }
  }
  return learned;
}

bool KnowledgeSet::derivable_name(const DomainName& n) const {
  if (names_.contains(n)) return true;
  if (secret_.contains(n)) return false;
  return n.is_root() || derivable_name(n.parent());
}

bool KnowledgeSet::derivable(const Term& t) const {
  if (analyzed_.contains(t)) return true;
  switch (t.kind()) {
    case TermKind::Atom: return true;
    case TermKind::Name: return derivable_name(parse_name(t.symbol()));
    case TermKind::Fresh: return t.creator() == kAdversaryRole;
    case TermKind::App: {
      static const std::set<std::string> constructors{"tuple", "pk", "h", "sign"};
      if (!constructors.contains(t.symbol())) return false;
      for (const auto& a : t.args()) {
        if (!derivable(a)) return false;
      }
      return true;
    }
  }
  return false;
}

bool KnowledgeSet::knows(const DomainName& name) const { return names_.contains(name); }

// ---------------------------------------------------------------- scripts

namespace {

using Modified = std::optional<std::pair<Response, std::string>>;

std::vector<ResourceRecord>* section_at(Response& r, std::size_t i) {
  switch (i) {
    case 0: return &r.answer;
    case 1: return &r.authority;
    default: return &r.additional;
  }
}

}  // namespace

Modified MitmDowngradeScript::on_response(AttackContext&, const Channel&, const Query&,
                                          const Response& r) {
  Response out = r;
  std::string action;
  for (std::size_t s = 0; s < 3; ++s) {
    auto& section = *section_at(out, s);
    std::map<RRKey, std::set<AlgorithmId>> algorithms;
    for (const auto& rr : section) {
      if (rr.type() == RecordType::RRSIG) {
        algorithms[{rr.owner, rr.covered_type()}].insert(rr.as<RrsigData>().algorithm);
      }
    }
    for (auto& rr : section) {
      if (rr.type() != RecordType::RRSIG) continue;
      if (algorithms[{rr.owner, rr.covered_type()}].size() < 2) continue;
      auto& f = rr.as<RrsigData>();
      if (f.algorithm == target_) continue;
      action += (action.empty() ? "" : ",") + rr.owner.to_string() + "/" + to_string(f.type_covered) +
                " alg" + std::to_string(f.algorithm.code) + "->alg" + std::to_string(target_.code);
      f.algorithm = target_;
    }
  }
  if (action.empty()) return std::nullopt;
  return std::make_pair(std::move(out), "rewrite " + action);
}

Modified RucInjectorScript::on_response(AttackContext& ctx, const Channel&, const Query& q,
                                        const Response& r) {
  if (!q.cd || q.qtype != RecordType::DNSKEY || q.qname != victim_) return std::nullopt;
  // Only the authoritative answer is replaced; referrals towards it pass.
  const bool authoritative = std::any_of(r.answer.begin(), r.answer.end(), [&](const ResourceRecord& rr) {
    return rr.owner == victim_ && rr.type() == RecordType::DNSKEY;
  });
  if (!authoritative) return std::nullopt;
  const Term fake = ctx.fresh.next("fake_dnskey", kAdversaryRole);
  Response out;
  out.rcode = Rcode::NoError;
  out.answer.push_back(
      ResourceRecord{victim_, DnskeyData{kSepKeyFlags, AlgorithmId{8}, public_key_of(fake)}});
  return std::make_pair(std::move(out), "inject fake DNSKEY NO_RRSIG for " + victim_.to_string());
}

Modified RandomTamperScript::on_response(AttackContext& ctx, const Channel&, const Query& q,
                                         const Response& r) {
  const bool positive = r.rcode == Rcode::NoError && !r.answer.empty();
  if (!ctx.sched.choose(rate_)) {
    if (positive) seen_.push_back({{q.qname, q.qtype}, r});
    return std::nullopt;
  }

  enum Action { SubstituteKey, RewriteDs, ForgeRrsig, DeleteAnswer, Replay };
  std::vector<Action> options;
  auto any_of_type = [&](RecordType t) {
    auto has = [t](const std::vector<ResourceRecord>& rrs) {
      return std::any_of(rrs.begin(), rrs.end(), [t](const ResourceRecord& rr) { return rr.type() == t; });
    };
    return has(r.answer) || has(r.authority) || has(r.additional);
  };
  if (any_of_type(RecordType::DNSKEY)) options.push_back(SubstituteKey);
  if (any_of_type(RecordType::DS)) options.push_back(RewriteDs);
  if (any_of_type(RecordType::RRSIG)) options.push_back(ForgeRrsig);
  if (!r.answer.empty()) options.push_back(DeleteAnswer);
  if (!seen_.empty()) options.push_back(Replay);
  if (options.empty()) return std::nullopt;

  Response out = r;
  const Action action = options[ctx.sched.draw(options.size())];
  // Picks the n-th record of type `t` across all sections.
  auto pick = [&](RecordType t) -> ResourceRecord& {
    std::vector<ResourceRecord*> found;
    for (std::size_t s = 0; s < 3; ++s) {
      for (auto& rr : *section_at(out, s)) {
        if (rr.type() == t) found.push_back(&rr);
      }
    }
    return *found[ctx.sched.draw(found.size())];
  };

  switch (action) {
    case SubstituteKey: {
      ResourceRecord& rr = pick(RecordType::DNSKEY);
      rr.as<DnskeyData>().key = public_key_of(ctx.fresh.next("fake_dnskey", kAdversaryRole));
      return std::make_pair(std::move(out), "substitute DNSKEY at " + rr.owner.to_string());
    }
    case RewriteDs: {
      ResourceRecord& rr = pick(RecordType::DS);
      rr.as<DsData>().digest = hash(Term::tuple({Term::atom("forged"), Term::name(rr.owner)}));
      return std::make_pair(std::move(out), "rewrite DS at " + rr.owner.to_string());
    }
    case ForgeRrsig: {
      ResourceRecord& rr = pick(RecordType::RRSIG);
      auto& f = rr.as<RrsigData>();
      const Term sk = ctx.fresh.next("forger", kAdversaryRole);
      f.signature = sign_with("forged " + to_string(rr), sk, f.algorithm);
      return std::make_pair(std::move(out), "forge RRSIG at " + rr.owner.to_string());
    }
    case DeleteAnswer: {
      const std::size_t i = ctx.sched.draw(out.answer.size());
      const std::string what = fingerprint(out.answer[i]);
      out.answer.erase(out.answer.begin() + static_cast<std::ptrdiff_t>(i));
      return std::make_pair(std::move(out), "delete " + what);
    }
    case Replay: {
      const auto& [question, old] = seen_[ctx.sched.draw(seen_.size())];
      return std::make_pair(old, "replay answer for " + question.first.to_string() + "/" +
                                     to_string(question.second));
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------- adversary

void Adversary::learn(const Term& t, const Channel& ch) {
  for (const DomainName& n : knowledge_.observe(t)) {
    Event e;
    e.kind = EventKind::KnowledgeGrow;
    e.activity = sched_.current();
    e.server = ch.to;
    e.name = n;
    trace_.emit(std::move(e));
  }
}

void Adversary::intercept_query(const Channel& ch, const Query& q) {
  if (ch.mode != DeliveryMode::Adversarial) return;
  learn(query_term(q), ch);
}

Response Adversary::intercept(const Channel& ch, const Query& q, const Response& r) {
  if (ch.mode != DeliveryMode::Adversarial) return r;
  learn(response_term(r), ch);
  Response current = r;
  AttackContext ctx{knowledge_, fresh_, sched_};
  for (auto& script : scripts_) {
    if (auto m = script->on_response(ctx, ch, q, current)) {
      inject(ch, m->first, script->kind() + ": " + m->second);
      current = std::move(m->first);
    }
  }
  return current;
}

void Adversary::inject(const Channel& ch, const Response& msg, const std::string& action) {
  if (!knowledge_.derivable(response_term(msg))) {
    throw DerivabilityError("adversary cannot derive the message for: " + action);
  }
  Event e;
  e.kind = EventKind::AdversaryAction;
  e.activity = sched_.current();
  e.server = ch.from;
  for (const auto& rr : msg.answer) e.records.push_back(fingerprint(rr));
  for (const auto& rr : msg.authority) e.records.push_back(fingerprint(rr));
  e.detail = action;
  trace_.emit(std::move(e));
}

}  // namespace dnssec
