#include "logicweb/term.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <unordered_set>
#include <utility>

namespace logicweb {

struct Term::Node {
  Kind kind;
  std::string text;
  std::int64_t integer = 0;
  double decimal = 0.0;
  VarId id = 0;
  std::vector<Term> args;
  std::size_t hash = 0;
};

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

const std::shared_ptr<const Term::Node>& nil_node() {
  static const auto node = [] {
    auto n = std::make_shared<Term::Node>();
    n->kind = Term::Kind::Atom;
    n->text = "[]";
    n->hash = mix(static_cast<std::size_t>(Term::Kind::Atom), std::hash<std::string>{}(n->text));
    return std::shared_ptr<const Term::Node>(std::move(n));
  }();
  return node;
}

std::atomic<VarId> next_var_id{1};

}  // namespace

VarId fresh_var_id() { return next_var_id.fetch_add(1, std::memory_order_relaxed); }

Term::Term() : node_(nil_node()) {}

Term Term::variable(std::string name) { return variable_with_id(fresh_var_id(), std::move(name)); }

Term Term::variable_with_id(VarId id, std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Variable;
  n->id = id;
  n->text = std::move(name);
  n->hash = mix(static_cast<std::size_t>(Kind::Variable), std::hash<VarId>{}(id));
  return Term(std::move(n));
}

Term Term::atom(std::string_view name) {
  if (name == "[]") return Term();
  auto n = std::make_shared<Node>();
  n->kind = Kind::Atom;
  n->text = std::string(name);
  n->hash = mix(static_cast<std::size_t>(Kind::Atom), std::hash<std::string>{}(n->text));
  return Term(std::move(n));
}

Term Term::integer(std::int64_t value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Integer;
  n->integer = value;
  n->hash = mix(static_cast<std::size_t>(Kind::Integer), std::hash<std::int64_t>{}(value));
  return Term(std::move(n));
}

Term Term::decimal(double value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Float;
  n->decimal = value;
  n->hash = mix(static_cast<std::size_t>(Kind::Float), std::hash<double>{}(value));
  return Term(std::move(n));
}

Term Term::string(std::string value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::String;
  n->text = std::move(value);
  n->hash = mix(static_cast<std::size_t>(Kind::String), std::hash<std::string>{}(n->text));
  return Term(std::move(n));
}

Term Term::compound(std::string_view functor, std::vector<Term> args) {
  if (args.empty()) return atom(functor);
  auto n = std::make_shared<Node>();
  n->kind = Kind::Compound;
  n->text = std::string(functor);
  std::size_t h = mix(static_cast<std::size_t>(Kind::Compound), std::hash<std::string>{}(n->text));
  for (const auto& a : args) h = mix(h, a.hash());
  n->hash = h;
  n->args = std::move(args);
  return Term(std::move(n));
}

Term Term::list(std::span<const Term> items, const Term& tail) {
  Term result = tail;
  for (auto it = items.rbegin(); it != items.rend(); ++it) {
    result = compound(".", {*it, result});
  }
  return result;
}

Term::Kind Term::kind() const { return node_->kind; }

bool Term::is_atom(std::string_view name) const { return is_atom() && node_->text == name; }

bool Term::is_functor(std::string_view name, std::size_t arity) const {
  if (arity == 0) return is_atom(name);
  return is_compound() && node_->args.size() == arity && node_->text == name;
}

const std::string& Term::name() const { return node_->text; }
std::size_t Term::arity() const { return node_->args.size(); }
const std::vector<Term>& Term::args() const { return node_->args; }
VarId Term::var_id() const { return node_->id; }
std::int64_t Term::int_value() const { return node_->integer; }
double Term::float_value() const { return node_->decimal; }
std::size_t Term::hash() const { return node_->hash; }

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.kind != y.kind || x.hash != y.hash) return false;
  switch (x.kind) {
    case Term::Kind::Variable:
      return x.id == y.id;
    case Term::Kind::Atom:
    case Term::Kind::String:
      return x.text == y.text;
    case Term::Kind::Integer:
      return x.integer == y.integer;
    case Term::Kind::Float:
      return x.decimal == y.decimal;
    case Term::Kind::Compound:
      return x.text == y.text && x.args == y.args;
  }
  return false;
}

namespace {

int kind_rank(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Variable: return 0;
    case Term::Kind::Integer:
    case Term::Kind::Float: return 1;
    case Term::Kind::Atom: return 2;
    case Term::Kind::String: return 3;
    case Term::Kind::Compound: return 4;
  }
  return 5;
}

double numeric(const Term& t) { return t.is_integer() ? static_cast<double>(t.int_value()) : t.float_value(); }

}  // namespace

int compare(const Term& a, const Term& b) {
  int ra = kind_rank(a), rb = kind_rank(b);
  if (ra != rb) return ra < rb ? -1 : 1;
  switch (a.kind()) {
    case Term::Kind::Variable:
      return a.var_id() < b.var_id() ? -1 : (a.var_id() > b.var_id() ? 1 : 0);
    case Term::Kind::Integer:
    case Term::Kind::Float: {
      if (a.is_integer() && b.is_integer()) {
        return a.int_value() < b.int_value() ? -1 : (a.int_value() > b.int_value() ? 1 : 0);
      }
      double x = numeric(a), y = numeric(b);
      if (x != y) return x < y ? -1 : 1;
      if (a.is_float() != b.is_float()) return a.is_float() ? -1 : 1;
      return 0;
    }
    case Term::Kind::Atom:
    case Term::Kind::String:
      return a.name().compare(b.name()) < 0 ? -1 : (a.name() == b.name() ? 0 : 1);
    case Term::Kind::Compound: {
      if (a.arity() != b.arity()) return a.arity() < b.arity() ? -1 : 1;
      if (int c = a.name().compare(b.name()); c != 0) return c < 0 ? -1 : 1;
      for (std::size_t i = 0; i < a.arity(); ++i) {
        if (int c = compare(a.arg(i), b.arg(i)); c != 0) return c;
      }
      return 0;
    }
  }
  return 0;
}

std::vector<Term> variables_of(const Term& t) {
  std::vector<Term> out;
  std::unordered_set<VarId> seen;
  std::function<void(const Term&)> walk = [&](const Term& x) {
    if (x.is_var()) {
      if (seen.insert(x.var_id()).second) out.push_back(x);
    } else if (x.is_compound()) {
      for (const auto& a : x.args()) walk(a);
    }
  };
  walk(t);
  return out;
}

bool occurs_in(VarId id, const Term& t) {
  if (t.is_var()) return t.var_id() == id;
  if (!t.is_compound()) return false;
  for (const auto& a : t.args()) {
    if (occurs_in(id, a)) return true;
  }
  return false;
}

// ---------------------------------------------------------------- Substitution

bool Substitution::bind(VarId id, Term value) {
  if (value.is_var() && value.var_id() == id) return false;
  map_.insert_or_assign(id, std::move(value));
  return true;
}

const Term* Substitution::find(VarId id) const {
  auto it = map_.find(id);
  return it == map_.end() ? nullptr : &it->second;
}

namespace {

Term apply_chasing(const Substitution& s, const Term& t, std::vector<VarId>& active) {
  if (t.is_var()) {
    const Term* bound = s.find(t.var_id());
    if (!bound) return t;
    for (VarId v : active) {
      if (v == t.var_id()) throw std::invalid_argument("cyclic substitution");
    }
    active.push_back(t.var_id());
    Term r = apply_chasing(s, *bound, active);
    active.pop_back();
    return r;
  }
  if (!t.is_compound()) return t;
  std::vector<Term> args;
  args.reserve(t.arity());
  bool changed = false;
  for (const auto& a : t.args()) {
    args.push_back(apply_chasing(s, a, active));
    changed = changed || !args.back().same_node(a);
  }
  return changed ? Term::compound(t.name(), std::move(args)) : t;
}

}  // namespace

Term apply(const Substitution& s, const Term& t) {
  if (s.empty()) return t;
  std::vector<VarId> active;
  return apply_chasing(s, t, active);
}

Substitution compose(const Substitution& s1, const Substitution& s2) {
  Substitution out;
  auto add = [&](VarId id) {
    if (out.contains(id)) return;
    Term v = apply(s2, apply(s1, Term::variable_with_id(id)));
    out.bind(id, std::move(v));
  };
  for (const auto& [id, _] : s1) add(id);
  for (const auto& [id, _] : s2) add(id);
  return out;
}

std::optional<Substitution> unify(const Term& a, const Term& b, bool occurs_check) {
  Bindings env;
  if (!unify(a, b, env, occurs_check)) return std::nullopt;
  // Resolved over every bound variable, unless bindings may be cyclic.
  Substitution out;
  for (const Term& v : variables_of(Term::compound("f", {a, b}))) {
    const Term* bound = env.lookup(v.var_id());
    if (!bound) continue;
    out.bind(v.var_id(), occurs_check ? env.resolve(v) : *bound);
  }
  return out;
}

Term rename_apart(const Term& t, std::unordered_map<VarId, Term>& renaming) {
  if (t.is_var()) {
    auto [it, inserted] = renaming.try_emplace(t.var_id());
    if (inserted) it->second = Term::variable(t.name());
    return it->second;
  }
  if (!t.is_compound()) return t;
  std::vector<Term> args;
  args.reserve(t.arity());
  for (const auto& a : t.args()) args.push_back(rename_apart(a, renaming));
  return Term::compound(t.name(), std::move(args));
}

Term rename_apart(const Term& t) {
  std::unordered_map<VarId, Term> renaming;
  return rename_apart(t, renaming);
}

namespace {

bool variant_walk(const Term& a, const Term& b, std::unordered_map<VarId, VarId>& ab,
                  std::unordered_map<VarId, VarId>& ba) {
  if (a.kind() != b.kind()) return false;
  if (a.is_var()) {
    auto [i1, new1] = ab.try_emplace(a.var_id(), b.var_id());
    auto [i2, new2] = ba.try_emplace(b.var_id(), a.var_id());
    return i1->second == b.var_id() && i2->second == a.var_id();
  }
  if (!a.is_compound()) return a == b;
  if (a.name() != b.name() || a.arity() != b.arity()) return false;
  for (std::size_t i = 0; i < a.arity(); ++i) {
    if (!variant_walk(a.arg(i), b.arg(i), ab, ba)) return false;
  }
  return true;
}

}  // namespace

bool variant(const Term& a, const Term& b) {
  std::unordered_map<VarId, VarId> ab, ba;
  return variant_walk(a, b, ab, ba);
}

// -------------------------------------------------------------------- Bindings

const Term* Bindings::lookup(VarId id) const {
  auto it = map_.find(id);
  return it == map_.end() ? nullptr : &it->second;
}

void Bindings::bind(VarId id, Term value) {
  map_.insert_or_assign(id, std::move(value));
  trail_.push_back(id);
}

void Bindings::undo(Mark m) {
  while (trail_.size() > m) {
    map_.erase(trail_.back());
    trail_.pop_back();
  }
}

Term Bindings::deref(const Term& t) const {
  Term cur = t;
  while (cur.is_var()) {
    const Term* next = lookup(cur.var_id());
    if (!next) break;
    cur = *next;
  }
  return cur;
}

Term Bindings::resolve(const Term& t) const {
  Term d = deref(t);
  if (!d.is_compound()) return d;
  std::vector<Term> args;
  args.reserve(d.arity());
  bool changed = false;
  for (const auto& a : d.args()) {
    args.push_back(resolve(a));
    changed = changed || !args.back().same_node(a);
  }
  return changed ? Term::compound(d.name(), std::move(args)) : d;
}

namespace {

bool occurs_deref(VarId id, const Term& t, const Bindings& env) {
  Term d = env.deref(t);
  if (d.is_var()) return d.var_id() == id;
  if (!d.is_compound()) return false;
  for (const auto& a : d.args()) {
    if (occurs_deref(id, a, env)) return true;
  }
  return false;
}

bool unify_walk(const Term& a, const Term& b, Bindings& env, bool occurs_check) {
  Term x = env.deref(a);
  Term y = env.deref(b);
  if (x.is_var() && y.is_var() && x.var_id() == y.var_id()) return true;
  if (x.is_var()) {
    if (occurs_check && occurs_deref(x.var_id(), y, env)) return false;
    env.bind(x.var_id(), y);
    return true;
  }
  if (y.is_var()) {
    if (occurs_check && occurs_deref(y.var_id(), x, env)) return false;
    env.bind(y.var_id(), x);
    return true;
  }
  if (x.kind() != y.kind()) return false;
  if (!x.is_compound()) return x == y;
  if (x.arity() != y.arity() || x.name() != y.name()) return false;
  for (std::size_t i = 0; i < x.arity(); ++i) {
    if (!unify_walk(x.arg(i), y.arg(i), env, occurs_check)) return false;
  }
  return true;
}

}  // namespace

bool unify(const Term& a, const Term& b, Bindings& env, bool occurs_check) {
  auto m = env.mark();
  if (unify_walk(a, b, env, occurs_check)) return true;
  env.undo(m);
  return false;
}

}  // namespace logicweb
