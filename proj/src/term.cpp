#include "dnssec/term.hpp"

#include <functional>
#include <tuple>

namespace dnssec {

struct Term::Node {
  TermKind kind;
  std::string symbol;
  std::vector<Term> args;
  std::uint64_t fresh_id = 0;
  std::string creator;
  std::size_t hash = 0;
};

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

}  // namespace

Term Term::atom(std::string value) {
  auto n = std::make_shared<Node>();
  n->kind = TermKind::Atom;
  n->symbol = std::move(value);
  n->hash = mix(1, std::hash<std::string>{}(n->symbol));
  return Term(std::move(n));
}

Term Term::name(const DomainName& d) {
  auto n = std::make_shared<Node>();
  n->kind = TermKind::Name;
  n->symbol = d.to_string();
  n->hash = mix(2, std::hash<std::string>{}(n->symbol));
  return Term(std::move(n));
}

Term Term::fresh(std::string label, std::uint64_t id, std::string creator) {
  auto n = std::make_shared<Node>();
  n->kind = TermKind::Fresh;
  n->symbol = std::move(label);
  n->fresh_id = id;
  n->creator = std::move(creator);
  n->hash = mix(mix(3, std::hash<std::string>{}(n->symbol)), id);
  return Term(std::move(n));
}

Term Term::app(std::string symbol, std::vector<Term> args) {
  auto n = std::make_shared<Node>();
  n->kind = TermKind::App;
  n->symbol = std::move(symbol);
  std::size_t h = mix(4, std::hash<std::string>{}(n->symbol));
  for (const auto& a : args) h = mix(h, a.hash());
  n->args = std::move(args);
  n->hash = h;
  return Term(std::move(n));
}

TermKind Term::kind() const { return node_->kind; }
const std::string& Term::symbol() const { return node_->symbol; }
const std::vector<Term>& Term::args() const { return node_->args; }
std::uint64_t Term::fresh_id() const { return node_->fresh_id; }
const std::string& Term::creator() const { return node_->creator; }
std::size_t Term::hash() const { return node_->hash; }

bool Term::is_app(const char* symbol) const {
  return node_->kind == TermKind::App && node_->symbol == symbol;
}

std::string Term::to_string() const {
  switch (node_->kind) {
    case TermKind::Atom:
      return "'" + node_->symbol + "'";
    case TermKind::Name:
      return "name(" + node_->symbol + ")";
    case TermKind::Fresh:
      return "~" + node_->symbol + "#" + std::to_string(node_->fresh_id);
    case TermKind::App: {
      std::string out = node_->symbol == "tuple" ? "<" : node_->symbol + "(";
      for (std::size_t i = 0; i < node_->args.size(); ++i) {
        if (i) out += ", ";
        out += node_->args[i].to_string();
      }
      out += node_->symbol == "tuple" ? ">" : ")";
      return out;
    }
  }
  return {};
}

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  return x.hash == y.hash && x.kind == y.kind && x.symbol == y.symbol &&
         x.fresh_id == y.fresh_id && x.creator == y.creator && x.args == y.args;
}

bool operator<(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return false;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (std::tie(x.kind, x.symbol, x.fresh_id, x.creator) !=
      std::tie(y.kind, y.symbol, y.fresh_id, y.creator)) {
    return std::tie(x.kind, x.symbol, x.fresh_id, x.creator) <
           std::tie(y.kind, y.symbol, y.fresh_id, y.creator);
  }
  return x.args < y.args;
}

}  // namespace dnssec
