#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dnssec/scenario.hpp"

namespace dnssec {

/// Universal properties must hold on every explored trace; existential ones
/// need a single witnessing trace.
enum class Quantifier : std::uint8_t { Universal, Existential };

struct PropertyInfo {
  int id = 0;
  std::string_view group;
  std::string_view name;
  bool cache = false;  // whether the property concerns the resolver cache
  Quantifier quantifier = Quantifier::Universal;
};

/// Ordered by id, 1 to 19.
const std::vector<PropertyInfo>& property_catalog();
/// Throws ContractViolation for an id outside the catalog.
const PropertyInfo& property_info(int id);

/// The first event at which a trace breaks a property (or fails to witness
/// an existential one).
struct Violation {
  std::size_t event = kNoEvent;
  std::string message;
  static constexpr std::size_t kNoEvent = SIZE_MAX;
};

/// Per-exploration memo of trace-independent facts.
struct CheckContext {
  std::shared_ptr<const Topology> topology;
  ResolverConfig config;
  std::map<std::string, bool> static_facts;
  std::set<std::string> checked_digests;
};

using PropertyCheck = std::function<std::optional<Violation>(const RunResult&, CheckContext&)>;

/// The checker registered for each catalog id.
const std::map<int, PropertyCheck>& property_checkers();
/// Throws ContractViolation naming every catalog id without a checker.
void require_full_coverage(const std::map<int, PropertyCheck>& checkers);

enum class PropertyOutcome : std::uint8_t { Holds, Falsified };
const char* to_string(PropertyOutcome o);

struct Verdict {
  int id = 0;
  std::string name;
  PropertyOutcome outcome = PropertyOutcome::Holds;
  std::uint64_t seeds_explored = 0;
  std::optional<std::uint64_t> counterexample_seed;
  std::optional<Violation> violation;
  std::string counterexample_trace;  // trace dump of the counterexample seed
};

struct SeedRange {
  std::uint64_t first = 1;
  std::uint64_t count = 500;
};

/// Runs `s` once per seed and evaluates every requested property on each
/// trace. Universal properties stop at their first violation, existential
/// ones at their first witness.
std::vector<Verdict> check_properties(const Scenario& s, const std::vector<int>& ids, SeedRange seeds);
Verdict check_property(int id, const Scenario& s, SeedRange seeds);

/// Re-runs a falsifying seed and re-checks it; true if it falsifies again.
bool replays(const Scenario& s, const Verdict& v);

/// Parses "1-12,15,19"; throws ContractViolation on malformed text or ids
/// outside the catalog.
std::vector<int> parse_property_list(std::string_view text);
/// Parses "1-500" or "7".
SeedRange parse_seed_range(std::string_view text);

enum class ReportFormat : std::uint8_t { Table, JsonLines };

/// One row per verdict. `expected` marks Falsified-expected properties.
std::string format_report(const std::vector<Verdict>& verdicts, const std::map<int, Expectation>& expected,
                          ReportFormat format, const std::map<int, std::string>& trace_paths = {});

}  // namespace dnssec
