#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace logicweb {

using VarId = std::uint64_t;

// Immutable first-order term. Copies share structure; a default-constructed
// Term is the empty list atom `[]`.
//
// Variables are identified by a process-unique id. The display name is kept
// only for printing answers.
class Term {
 public:
  enum class Kind : std::uint8_t { Variable, Atom, Integer, Float, String, Compound };

  Term();

  static Term variable(std::string name = {});
  static Term variable_with_id(VarId id, std::string name = {});
  static Term atom(std::string_view name);
  static Term integer(std::int64_t value);
  static Term decimal(double value);
  static Term string(std::string value);
  // A zero-arity compound collapses to an atom.
  static Term compound(std::string_view functor, std::vector<Term> args);
  static Term list(std::span<const Term> items, const Term& tail = Term());
  static Term nil() { return Term(); }

  Kind kind() const;
  bool is_var() const { return kind() == Kind::Variable; }
  bool is_atom() const { return kind() == Kind::Atom; }
  bool is_atom(std::string_view name) const;
  bool is_integer() const { return kind() == Kind::Integer; }
  bool is_float() const { return kind() == Kind::Float; }
  bool is_number() const { return is_integer() || is_float(); }
  bool is_string() const { return kind() == Kind::String; }
  bool is_compound() const { return kind() == Kind::Compound; }
  bool is_callable() const { return is_atom() || is_compound(); }
  bool is_atomic() const { return !is_var() && !is_compound(); }
  // Atom or string.
  bool is_text() const { return is_atom() || is_string(); }
  bool is_functor(std::string_view name, std::size_t arity) const;

  // Atom name, compound functor, string contents, or variable display name.
  const std::string& name() const;
  const std::string& text() const { return name(); }
  std::size_t arity() const;
  const std::vector<Term>& args() const;
  const Term& arg(std::size_t i) const { return args()[i]; }
  VarId var_id() const;
  std::int64_t int_value() const;
  double float_value() const;

  // Structural identity (variables compare by id).
  friend bool operator==(const Term& a, const Term& b);
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }

  std::size_t hash() const;
  bool same_node(const Term& other) const { return node_ == other.node_; }

  struct Node;  // opaque

 private:
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct TermHash {
  std::size_t operator()(const Term& t) const { return t.hash(); }
};

VarId fresh_var_id();

// Total order used for deterministic output (standard order of terms:
// Var < Number < Atom < String < Compound).
int compare(const Term& a, const Term& b);

// Collect distinct variables in left-to-right first-occurrence order.
std::vector<Term> variables_of(const Term& t);

bool occurs_in(VarId id, const Term& t);

// Finite map from variables to terms, the answer form of a derivation.
class Substitution {
 public:
  using Map = std::map<VarId, Term>;

  Substitution() = default;

  // Returns false (and stores nothing) for a self-binding X ↦ X.
  bool bind(VarId id, Term value);
  const Term* find(VarId id) const;
  bool contains(VarId id) const { return map_.count(id) != 0; }
  std::size_t size() const { return map_.size(); }
  bool empty() const { return map_.empty(); }
  Map::const_iterator begin() const { return map_.begin(); }
  Map::const_iterator end() const { return map_.end(); }

  friend bool operator==(const Substitution&, const Substitution&) = default;

 private:
  Map map_;
};

// Replaces bound variables recursively until no bound variable remains.
// Throws std::invalid_argument on a cyclic substitution.
Term apply(const Substitution& s, const Term& t);

// apply(compose(s1, s2), t) == apply(s2, apply(s1, t)) whenever s2 does not
// reintroduce variables of dom(s1) (always the case for successive answers
// of a derivation).
Substitution compose(const Substitution& s1, const Substitution& s2);

// An idempotent most general unifier. Without the occurs check the result
// is the raw binding set, which may be cyclic.
std::optional<Substitution> unify(const Term& a, const Term& b, bool occurs_check = true);

Term rename_apart(const Term& t);
// Renames with a caller-provided map so several terms can share the renaming.
Term rename_apart(const Term& t, std::unordered_map<VarId, Term>& renaming);

bool variant(const Term& a, const Term& b);

// Mutable binding environment with a trail, used by the engine for
// backtracking. Values are never mutated; only the id->term map changes.
class Bindings {
 public:
  using Mark = std::size_t;

  const Term* lookup(VarId id) const;
  void bind(VarId id, Term value);
  Mark mark() const { return trail_.size(); }
  void undo(Mark m);

  // Follows variable chains at the top level only.
  Term deref(const Term& t) const;
  // Full substitution of every bound variable.
  Term resolve(const Term& t) const;

  std::size_t size() const { return map_.size(); }

 private:
  std::unordered_map<VarId, Term> map_;
  std::vector<VarId> trail_;
};

// Unifies under `env`. On failure every binding made by this call is undone.
bool unify(const Term& a, const Term& b, Bindings& env, bool occurs_check = true);

}  // namespace logicweb
