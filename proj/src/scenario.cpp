#include "dnssec/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "dnssec/errors.hpp"

namespace dnssec {

const char* to_string(Expectation e) { return e == Expectation::Holds ? "Holds" : "Falsified"; }

// ---------------------------------------------------------------- schema

namespace {

using nlohmann::json;

/// Collects schema violations with their JSON paths.
class Checker {
 public:
  void fail(const std::string& path, const std::string& what) { errors_.push_back(path + ": " + what); }
  const std::vector<std::string>& errors() const { return errors_; }

  bool object(const json& j, const std::string& path, std::initializer_list<const char*> required,
              std::initializer_list<const char*> optional) {
    if (!j.is_object()) {
      fail(path, "expected an object");
      return false;
    }
    for (const char* k : required) {
      if (!j.contains(k)) fail(path, std::string("missing required key \"") + k + "\"");
    }
    for (const auto& [k, v] : j.items()) {
      const auto known = [&](std::initializer_list<const char*> keys) {
        return std::any_of(keys.begin(), keys.end(), [&](const char* x) { return k == x; });
      };
      if (!known(required) && !known(optional)) fail(path, "unknown key \"" + k + "\"");
    }
    return true;
  }

  std::optional<std::string> string(const json& j, const std::string& path) {
    if (!j.is_string()) {
      fail(path, "expected a string");
      return std::nullopt;
    }
    return j.get<std::string>();
  }

  std::optional<std::int64_t> integer(const json& j, const std::string& path, std::int64_t lo,
                                      std::int64_t hi) {
    if (!j.is_number_integer()) {
      fail(path, "expected an integer");
      return std::nullopt;
    }
    const auto v = j.get<std::int64_t>();
    if (v < lo || v > hi) {
      fail(path, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
      return std::nullopt;
    }
    return v;
  }

  std::optional<double> probability(const json& j, const std::string& path) {
    if (!j.is_number()) {
      fail(path, "expected a number");
      return std::nullopt;
    }
    const double v = j.get<double>();
    if (v < 0.0 || v > 1.0) {
      fail(path, "must lie in [0, 1]");
      return std::nullopt;
    }
    return v;
  }

  std::optional<bool> boolean(const json& j, const std::string& path) {
    if (!j.is_boolean()) {
      fail(path, "expected a boolean");
      return std::nullopt;
    }
    return j.get<bool>();
  }

  template <class E>
  std::optional<E> choice(const json& j, const std::string& path,
                          std::initializer_list<std::pair<const char*, E>> options) {
    auto s = string(j, path);
    if (!s) return std::nullopt;
    for (const auto& [text, value] : options) {
      if (*s == text) return value;
    }
    std::string allowed;
    for (const auto& [text, value] : options) allowed += (allowed.empty() ? "" : ", ") + std::string(text);
    fail(path, "\"" + *s + "\" is not one of {" + allowed + "}");
    return std::nullopt;
  }

  std::optional<DomainName> name(const json& j, const std::string& path) {
    auto s = string(j, path);
    if (!s) return std::nullopt;
    try {
      return parse_name(*s);
    } catch (const Error& e) {
      fail(path, e.what());
      return std::nullopt;
    }
  }

  std::optional<RecordType> type(const json& j, const std::string& path) {
    auto s = string(j, path);
    if (!s) return std::nullopt;
    try {
      return parse_record_type(*s);
    } catch (const Error& e) {
      fail(path, e.what());
      return std::nullopt;
    }
  }

 private:
  std::vector<std::string> errors_;
};

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw ScenarioError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void parse_resolver(Checker& c, const json& j, ResolverConfig& cfg) {
  if (!c.object(j, "resolver", {},
                {"supported_algorithms", "downgrade_policy", "cache_partitioning",
                 "mixed_denial_policy", "depth_bound", "expiry_probability", "delta", "cache"})) {
    return;
  }
  if (j.contains("supported_algorithms")) {
    const json& a = j["supported_algorithms"];
    if (!a.is_array()) {
      c.fail("resolver.supported_algorithms", "expected an array");
    } else {
      cfg.supported_algorithms.clear();
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (auto v = c.integer(a[i], "resolver.supported_algorithms[" + std::to_string(i) + "]", 1, 255)) {
          cfg.supported_algorithms.insert(AlgorithmId{static_cast<int>(*v)});
        }
      }
    }
  }
  if (j.contains("downgrade_policy")) {
    if (auto v = c.choice<DowngradePolicy>(j["downgrade_policy"], "resolver.downgrade_policy",
                                           {{"Strict", DowngradePolicy::Strict},
                                            {"Permissive", DowngradePolicy::Permissive}})) {
      cfg.downgrade_policy = *v;
    }
  }
  if (j.contains("cache_partitioning")) {
    if (auto v = c.choice<CachePartitioning>(
            j["cache_partitioning"], "resolver.cache_partitioning",
            {{"Unified", CachePartitioning::Unified},
             {"ByValidationState", CachePartitioning::ByValidationState}})) {
      cfg.cache_partitioning = *v;
    }
  }
  if (j.contains("mixed_denial_policy")) {
    if (auto v = c.choice<MixedDenialPolicy>(j["mixed_denial_policy"], "resolver.mixed_denial_policy",
                                             {{"Accept", MixedDenialPolicy::Accept},
                                              {"Servfail", MixedDenialPolicy::Servfail}})) {
      cfg.mixed_denial_policy = *v;
    }
  }
  if (j.contains("depth_bound")) {
    if (auto v = c.integer(j["depth_bound"], "resolver.depth_bound", 1, 64)) cfg.depth_bound = static_cast<int>(*v);
  }
  if (j.contains("expiry_probability")) {
    if (auto v = c.probability(j["expiry_probability"], "resolver.expiry_probability")) cfg.expiry_probability = *v;
  }
  if (j.contains("delta")) {
    if (auto v = c.integer(j["delta"], "resolver.delta", 1, 1000000)) cfg.delta = static_cast<int>(*v);
  }
  if (j.contains("cache")) {
    if (auto v = c.boolean(j["cache"], "resolver.cache")) cfg.cache_enabled = *v;
  }
}

void parse_zone(Checker& c, const json& j, const std::string& path,
                const std::filesystem::path& base_dir, Scenario& s) {
  if (!c.object(j, path, {"server", "file"}, {"chain", "nsec3", "assignment", "algorithms", "mode"})) return;
  ZoneSpec z;
  if (auto v = c.string(j["server"], path + ".server")) z.server = *v;
  if (auto v = c.string(j["file"], path + ".file")) {
    z.source = *v;
    try {
      z.zone_text = read_file(base_dir / *v);
    } catch (const ScenarioError& e) {
      c.fail(path + ".file", e.what());
    }
  }
  if (j.contains("chain")) {
    if (auto v = c.choice<ChainKind>(j["chain"], path + ".chain",
                                     {{"nsec", ChainKind::Nsec}, {"nsec3", ChainKind::Nsec3},
                                      {"mixed", ChainKind::Mixed}})) {
      z.chain = *v;
    }
  }
  if (j.contains("nsec3")) {
    const json& p = j["nsec3"];
    if (c.object(p, path + ".nsec3", {}, {"iterations", "salt"})) {
      if (p.contains("iterations")) {
        if (auto v = c.integer(p["iterations"], path + ".nsec3.iterations", 0, 2500)) {
          z.nsec3.iterations = static_cast<int>(*v);
        }
      }
      if (p.contains("salt")) {
        if (auto v = c.string(p["salt"], path + ".nsec3.salt")) {
          const bool hex = std::all_of(v->begin(), v->end(), [](char ch) { return std::isxdigit(static_cast<unsigned char>(ch)); });
          if (!hex || v->size() % 2) c.fail(path + ".nsec3.salt", "expected an even-length hex string");
          z.nsec3.salt_hex = *v;
        }
      }
    }
  }
  if (j.contains("assignment")) {
    const json& a = j["assignment"];
    if (!a.is_object()) {
      c.fail(path + ".assignment", "expected an object");
    } else {
      for (const auto& [k, v] : a.items()) {
        const std::string sub = path + ".assignment." + k;
        std::optional<DomainName> n;
        try {
          n = parse_name(k);
        } catch (const Error& e) {
          c.fail(sub, e.what());
        }
        auto fam = c.choice<DenialFamily>(v, sub, {{"nsec", DenialFamily::Nsec}, {"nsec3", DenialFamily::Nsec3}});
        if (n && fam) z.assignment[*n] = *fam;
      }
    }
  }
  if (z.chain == ChainKind::Mixed && z.assignment.empty()) {
    c.fail(path + ".assignment", "required when chain is \"mixed\"");
  }
  if (j.contains("algorithms")) {
    const json& a = j["algorithms"];
    if (!a.is_array() || a.empty()) {
      c.fail(path + ".algorithms", "expected a non-empty array");
    } else {
      z.algorithms.clear();
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (auto v = c.integer(a[i], path + ".algorithms[" + std::to_string(i) + "]", 1, 255)) {
          z.algorithms.push_back(AlgorithmId{static_cast<int>(*v)});
        }
      }
    }
  }
  if (j.contains("mode")) {
    if (auto v = c.choice<ServerMode>(j["mode"], path + ".mode",
                                      {{"honest", ServerMode::Honest}, {"malicious", ServerMode::Malicious}})) {
      z.mode = *v;
    }
  }
  s.zones.push_back(std::move(z));
}

void parse_client(Checker& c, const json& j, const std::string& path, Scenario& s) {
  if (!c.object(j, path, {"name", "queries"}, {"phase"})) return;
  ClientSpec client;
  if (auto v = c.string(j["name"], path + ".name")) client.name = *v;
  if (j.contains("phase")) {
    if (auto v = c.integer(j["phase"], path + ".phase", 0, 1000)) client.phase = static_cast<int>(*v);
  }
  const json& qs = j["queries"];
  if (!qs.is_array()) {
    c.fail(path + ".queries", "expected an array");
  } else {
    for (std::size_t i = 0; i < qs.size(); ++i) {
      const std::string qp = path + ".queries[" + std::to_string(i) + "]";
      if (!c.object(qs[i], qp, {"name", "type"}, {"cd"})) continue;
      Query q;
      auto n = c.name(qs[i]["name"], qp + ".name");
      auto t = c.type(qs[i]["type"], qp + ".type");
      if (qs[i].contains("cd")) {
        if (auto v = c.boolean(qs[i]["cd"], qp + ".cd")) q.cd = *v;
      }
      if (n && t) {
        q.qname = *n;
        q.qtype = *t;
        client.queries.push_back(q);
      }
    }
  }
  s.clients.push_back(std::move(client));
}

void parse_attacker(Checker& c, const json& j, const std::string& path, Scenario& s) {
  if (!c.object(j, path, {"kind"}, {"rate", "target_algorithm", "victim"})) return;
  AttackerSpec a;
  auto kind = c.string(j["kind"], path + ".kind");
  if (!kind) return;
  a.kind = *kind;
  if (a.kind == "RandomTamper") {
    if (!j.contains("rate")) c.fail(path, "RandomTamper requires \"rate\"");
    else if (auto v = c.probability(j["rate"], path + ".rate")) a.rate = *v;
  } else if (a.kind == "MitmDowngrade") {
    if (j.contains("target_algorithm")) {
      if (auto v = c.integer(j["target_algorithm"], path + ".target_algorithm", 1, 255)) {
        a.target_algorithm = AlgorithmId{static_cast<int>(*v)};
      }
    }
  } else if (a.kind == "RucInjector") {
    if (!j.contains("victim")) c.fail(path, "RucInjector requires \"victim\"");
    else if (auto v = c.name(j["victim"], path + ".victim")) a.victim = *v;
  } else if (a.kind != "Passive") {
    c.fail(path + ".kind", "\"" + a.kind + "\" is not one of {Passive, MitmDowngrade, RucInjector, RandomTamper}");
  }
  s.attackers.push_back(std::move(a));
}

}  // namespace

Scenario parse_scenario(const std::string& json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("invalid JSON: ") + e.what());
  }

  Checker c;
  Scenario s;
  if (c.object(doc, "$", {"name", "zones"},
               {"seed", "seeds", "step_budget", "resolver", "channels", "clients", "attackers",
                "enumeration", "expect"})) {
    if (auto v = c.string(doc["name"], "name")) s.name = *v;
    if (doc.contains("seed")) {
      if (auto v = c.integer(doc["seed"], "seed", 0, INT64_MAX)) s.seed = static_cast<std::uint64_t>(*v);
    }
    if (doc.contains("seeds")) {
      const json& r = doc["seeds"];
      if (c.object(r, "seeds", {"first", "count"}, {})) {
        auto first = c.integer(r["first"], "seeds.first", 0, INT64_MAX);
        auto count = c.integer(r["count"], "seeds.count", 1, 1000000);
        if (first && count) {
          s.first_seed = static_cast<std::uint64_t>(*first);
          s.seed_count = static_cast<std::uint64_t>(*count);
        }
      }
    }
    if (doc.contains("step_budget")) {
      if (auto v = c.integer(doc["step_budget"], "step_budget", 1, 100000000)) {
        s.step_budget = static_cast<std::size_t>(*v);
      }
    }
    if (doc.contains("resolver")) parse_resolver(c, doc["resolver"], s.resolver);
    if (doc.contains("channels")) {
      if (auto v = c.choice<DeliveryMode>(doc["channels"], "channels",
                                          {{"honest", DeliveryMode::Honest},
                                           {"adversarial", DeliveryMode::Adversarial}})) {
        s.channel_mode = *v;
      }
    }
    const json& zones = doc["zones"];
    if (!zones.is_array() || zones.empty()) {
      c.fail("zones", "expected a non-empty array");
    } else {
      for (std::size_t i = 0; i < zones.size(); ++i) {
        parse_zone(c, zones[i], "zones[" + std::to_string(i) + "]", base_dir, s);
      }
    }
    if (doc.contains("clients")) {
      const json& cl = doc["clients"];
      if (!cl.is_array()) c.fail("clients", "expected an array");
      else for (std::size_t i = 0; i < cl.size(); ++i) parse_client(c, cl[i], "clients[" + std::to_string(i) + "]", s);
    }
    if (doc.contains("attackers")) {
      const json& at = doc["attackers"];
      if (!at.is_array()) c.fail("attackers", "expected an array");
      else for (std::size_t i = 0; i < at.size(); ++i) parse_attacker(c, at[i], "attackers[" + std::to_string(i) + "]", s);
    }
    if (doc.contains("enumeration")) {
      const json& e = doc["enumeration"];
      if (c.object(e, "enumeration", {"apex"}, {"budget", "phase"})) {
        EnumerationSpec spec;
        if (auto v = c.name(e["apex"], "enumeration.apex")) spec.apex = *v;
        if (e.contains("budget")) {
          if (auto v = c.integer(e["budget"], "enumeration.budget", 1, 100000)) spec.budget = static_cast<std::size_t>(*v);
        }
        if (e.contains("phase")) {
          if (auto v = c.integer(e["phase"], "enumeration.phase", 0, 1000)) spec.phase = static_cast<int>(*v);
        }
        s.enumeration = spec;
      }
    }
    if (doc.contains("expect")) {
      const json& ex = doc["expect"];
      if (!ex.is_object()) {
        c.fail("expect", "expected an object");
      } else {
        for (const auto& [k, v] : ex.items()) {
          int id = 0;
          try {
            std::size_t used = 0;
            id = std::stoi(k, &used);
            if (used != k.size()) id = 0;
          } catch (const std::exception&) {
            id = 0;
          }
          if (id < 1 || id > 19) {
            c.fail("expect." + k, "property ids run from 1 to 19");
            continue;
          }
          if (auto e = c.choice<Expectation>(v, "expect." + k,
                                             {{"Holds", Expectation::Holds}, {"Falsified", Expectation::Falsified}})) {
            s.expect[id] = *e;
          }
        }
      }
    }
  }

  if (!c.errors().empty()) {
    std::string msg = "scenario schema violations:";
    for (const auto& e : c.errors()) msg += "\n  " + e;
    throw ScenarioError(msg);
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  return parse_scenario(read_file(path), path.parent_path());
}

// ---------------------------------------------------------------- topology

const NameServer* Topology::server_for(const DomainName& apex) const {
  for (const auto& s : servers) {
    if (s.zone.apex() == apex) return &s;
  }
  return nullptr;
}

Topology build_topology(const Scenario& s) {
  struct Loaded {
    const ZoneSpec* spec;
    Zone zone;
  };
  std::vector<Loaded> loaded;
  for (const auto& spec : s.zones) {
    try {
      loaded.push_back({&spec, strip_dnssec(load_zone(spec.zone_text))});
    } catch (const ZoneParseError& e) {
      throw ScenarioError(spec.source + ": " + e.what());
    }
  }
  // Deepest zones first, so that parents can publish their children's DS.
  std::stable_sort(loaded.begin(), loaded.end(), [](const Loaded& a, const Loaded& b) {
    return a.zone.apex().label_count() > b.zone.apex().label_count();
  });

  Topology t;
  FreshSource fresh;
  std::vector<SignedZone> signed_zones;
  for (auto& [spec, zone] : loaded) {
    for (const auto& child : signed_zones) {
      if (zone.delegations().contains(child.apex())) set_delegation_ds(zone, child.apex(), ds_for(child));
    }
    switch (spec->chain) {
      case ChainKind::Nsec: zone = build_nsec_chain(std::move(zone)); break;
      case ChainKind::Nsec3: zone = build_nsec3_chain(std::move(zone), spec->nsec3); break;
      case ChainKind::Mixed:
        try {
          zone = build_mixed_chain(std::move(zone), spec->assignment, spec->nsec3);
        } catch (const Error& e) {
          throw ScenarioError(spec->source + ": " + e.what());
        }
        break;
    }
    std::vector<KeyPair> keys;
    for (AlgorithmId alg : spec->algorithms) {
      keys.push_back(generate_key(fresh, zone.apex().to_string(), KeyRole::Zsk, alg));
      keys.push_back(generate_key(fresh, zone.apex().to_string(), KeyRole::Ksk, alg));
    }
    signed_zones.push_back(sign_zone(std::move(zone), std::move(keys)));
    t.servers.push_back(NameServer{spec->server, signed_zones.back(), spec->mode});
  }

  NameSet apexes;
  NameSet referenced;
  for (const auto& srv : t.servers) {
    const Zone& z = srv.zone.zone();
    apexes.insert(z.apex());
    for (const auto& n : z.authoritative_names()) t.hosted_names.insert(n);
    for (const auto& [key, set] : z.rrsets()) {
      for (const auto& rr : set.records) {
        if (rr.type() == RecordType::NS) referenced.insert(rr.as<NsData>().target);
        if (rr.type() == RecordType::MX) referenced.insert(rr.as<MxData>().exchange);
      }
    }
  }
  for (const auto& n : t.hosted_names) {
    if (!apexes.contains(n) && !referenced.contains(n)) t.secret_names.insert(n);
  }

  const NameServer* root = t.server_for(DomainName::root());
  if (!root) throw ScenarioError("scenario has no root zone");
  t.root_server = root->id;
  t.anchor = TrustAnchor{ds_for(root->zone)};
  return t;
}

// ---------------------------------------------------------------- running

namespace {

Event activity_event(EventKind kind, ActivityId who, std::string detail) {
  Event e;
  e.kind = kind;
  e.activity = who;
  e.detail = std::move(detail);
  return e;
}

std::vector<std::string> fingerprints(const Response& r) {
  std::vector<std::string> out;
  for (const auto* section : {&r.answer, &r.authority}) {
    for (const auto& rr : *section) out.push_back(fingerprint(rr));
  }
  return out;
}

using Ask = std::function<Task<ValidatedResponse>(std::string, Query)>;

Task<void> run_client(const Ask& ask, ClientSpec c) {
  for (const Query& q : c.queries) {
    auto asking = ask(c.name, q);
    co_await std::move(asking);
  }
}

Task<void> run_enumeration(const Ask& ask, EnumerationSpec spec, std::optional<EnumerationResult>& out) {
  Endpoint endpoint = [&ask](Query q) { return ask(kAdversaryRole, std::move(q)); };
  auto walking = enumerate_zone(endpoint, spec.apex, spec.budget);
  out = co_await std::move(walking);
}

}  // namespace

RunResult run_scenario(const Scenario& s, std::uint64_t seed) {
  return run_scenario(s, seed, std::make_shared<const Topology>(build_topology(s)));
}

RunResult run_scenario(const Scenario& s, std::uint64_t seed, std::shared_ptr<const Topology> topology) {
  RunResult out;
  out.seed = seed;
  out.topology = topology;
  out.config = s.resolver;
  out.trace = Trace(s.step_budget);
  Trace& trace = out.trace;

  Scheduler sched(seed);
  LockTable locks(sched, trace);
  Cache cache(locks, sched, trace);
  Adversary adversary(sched, trace, topology->secret_names);
  for (const auto& a : s.attackers) {
    if (a.kind == "Passive") adversary.add_script(std::make_unique<PassiveScript>());
    if (a.kind == "MitmDowngrade") adversary.add_script(std::make_unique<MitmDowngradeScript>(a.target_algorithm));
    if (a.kind == "RucInjector") adversary.add_script(std::make_unique<RucInjectorScript>(a.victim));
    if (a.kind == "RandomTamper") adversary.add_script(std::make_unique<RandomTamperScript>(a.rate));
  }
  Network net(sched, trace, &adversary, s.channel_mode);
  for (const auto& srv : topology->servers) net.add_server(srv);
  Resolver resolver(sched, trace, net, locks, cache, topology->anchor, s.resolver, topology->root_server);

  sched.on_activity = [&](ActivityId who, bool started) {
    trace.emit(activity_event(started ? EventKind::ActivityStart : EventKind::ActivityEnd, who,
                              sched.name_of(who)));
  };

  Ask ask = [&](std::string client, Query q) -> Task<ValidatedResponse> {
    q.qid = net.next_qid();
    Event e;
    e.kind = EventKind::ClientQuery;
    e.activity = sched.current();
    e.name = q.qname;
    e.type = q.qtype;
    e.qid = q.qid;
    e.cd = q.cd;
    e.detail = client;
    trace.emit(e);
    auto resolving = resolver.resolve(q);
    ValidatedResponse r = co_await std::move(resolving);
    Event done = e;
    done.kind = EventKind::ClientResponse;
    done.activity = sched.current();
    done.status = to_string(r.security_state);
    done.records = fingerprints(r.response);
    done.detail = client + " rcode=" + to_string(r.response.rcode) + (r.ede.empty() ? "" : " ede=" + r.ede);
    const std::size_t seq = trace.emit(std::move(done));
    out.results.push_back({client, q, r, seq});
    co_return r;
  };

  for (const auto& c : s.clients) {
    sched.spawn(c.name, c.phase, [&ask, c] { return run_client(ask, c); });
  }
  if (s.enumeration) {
    const EnumerationSpec spec = *s.enumeration;
    sched.spawn("enumerator", spec.phase,
                [&ask, &out, spec] { return run_enumeration(ask, spec, out.enumeration); });
  }

  try {
    for (const auto& srv : topology->servers) {
      for (const auto& n : srv.zone.zone().authoritative_names()) {
        Event e;
        e.kind = EventKind::ServerDomainName;
        e.server = srv.id;
        e.name = n;
        trace.emit(std::move(e));
      }
      for (const auto& rec : srv.zone.sign_log().entries()) {
        Event e;
        e.kind = EventKind::SignEvent;
        e.server = srv.id;
        for (const auto& k : srv.zone.keys()) {
          if (k.key_id() == rec.key_id) e.key_id = key_fingerprint(k.public_key());
        }
        e.digest = rec.message_digest;
        e.detail = rec.key_id;
        trace.emit(std::move(e));
      }
    }
    sched.run(s.step_budget);
    out.completed = true;
  } catch (const Error& e) {
    out.failure = e.what();
  }

  out.hits = resolver.hits();
  out.accepted = resolver.accepted();
  out.cache = cache.snapshot();
  out.outstanding_locks = locks.outstanding();
  out.scheduler_steps = sched.steps();
  out.knowledge = adversary.knowledge();
  return out;
}

// ---------------------------------------------------------------- enumeration

namespace {

/// The NSEC owned by `owner` and signed by `apex` in a response, if any.
std::optional<NsecData> nsec_at(const Response& r, const DomainName& owner, const DomainName& apex) {
  std::optional<NsecData> found;
  bool signed_by_apex = false;
  for (const auto& rr : r.authority) {
    if (rr.owner != owner) continue;
    if (rr.type() == RecordType::NSEC) found = rr.as<NsecData>();
    if (rr.type() == RecordType::RRSIG) {
      const auto& sig = rr.as<RrsigData>();
      if (sig.type_covered == RecordType::NSEC && sig.signer == apex) signed_by_apex = true;
    }
  }
  return signed_by_apex ? found : std::nullopt;
}

void collect_hashes(const Response& r, std::set<std::string>& hashes) {
  for (const auto* section : {&r.answer, &r.authority}) {
    for (const auto& rr : *section) {
      if (rr.type() != RecordType::NSEC3) continue;
      hashes.insert(rr.owner.labels().front());
      hashes.insert(rr.as<Nsec3Data>().next_hashed.value);
    }
  }
}

bool has_nsec3(const Response& r) {
  return std::any_of(r.authority.begin(), r.authority.end(),
                     [](const ResourceRecord& rr) { return rr.type() == RecordType::NSEC3; });
}

}  // namespace

Task<EnumerationResult> enumerate_zone(Endpoint resolve, DomainName apex, std::size_t budget) {
  EnumerationResult out;
  const std::string zero(1, '\0');
  DomainName cursor = apex;
  while (out.queries < budget) {
    out.names.insert(cursor);
    // First try the first possible child of the cursor, then the first name
    // after the cursor's subtree, which stays in this zone at a delegation.
    std::vector<DomainName> probes{cursor.child(zero)};
    if (cursor != apex) {
      std::vector<std::string> labels = cursor.labels();
      labels.front() += zero;
      probes.emplace_back(std::move(labels));
    }
    std::optional<NsecData> step;
    for (const auto& probe : probes) {
      if (out.queries >= budget) break;
      ++out.queries;
      auto resolving = resolve(Query{probe, RecordType::A});
      ValidatedResponse r = co_await std::move(resolving);
      const Response& response = r.response;
      if (has_nsec3(response)) {
        collect_hashes(response, out.hashes);
        out.blocked = true;
        out.names.clear();
        co_return out;
      }
      step = nsec_at(response, cursor, apex);
      if (step) break;
    }
    if (!step || step->next == apex) break;
    cursor = step->next;
  }
  co_return out;
}

}  // namespace dnssec
