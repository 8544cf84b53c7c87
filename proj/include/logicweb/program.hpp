#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "logicweb/term.hpp"

namespace logicweb {

// Raised for terms that do not denote a program identifier or expression.
class ExprError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// scheme ":" rest, with a non-empty rest.
bool valid_url(std::string_view url);

struct PostField {
  std::string name;
  std::string value;
  friend bool operator==(const PostField&, const PostField&) = default;
  friend auto operator<=>(const PostField&, const PostField&) = default;
};

class ProgramId {
 public:
  enum class Method { Head, Get, Post };

  static ProgramId head(std::string url);
  static ProgramId get(std::string url);
  static ProgramId post(std::vector<PostField> fields, std::string url);

  Method method() const { return method_; }
  const std::vector<PostField>& fields() const { return fields_; }
  const std::string& url() const { return url_; }

  // `get`, `head` or `post([field("name", "value"), ...])`.
  Term method_term() const;
  // lw(Method, "url")
  Term to_term() const;
  const std::string& to_string() const { return key_; }

  // Accepts lw(head|get|post(Fields), Url) with Url an atom or string.
  static std::optional<ProgramId> from_term(const Term& t);

  friend bool operator==(const ProgramId&, const ProgramId&) = default;
  // Orders by serialized form, the deterministic install order.
  friend bool operator<(const ProgramId& a, const ProgramId& b) { return a.key_ < b.key_; }

 private:
  ProgramId(Method m, std::vector<PostField> f, std::string url);
  Method method_;
  std::vector<PostField> fields_;
  std::string url_;
  std::string key_;
};

struct Clause {
  Term head;
  Term body;  // `true` for facts

  // Accepts `H :- B` or a fact. Throws ExprError for a non-callable head.
  static Clause from_term(const Term& t);
  Term to_term() const;
};

// Reads clause text. Throws ParseError with line/column; directives are rejected.
std::vector<Clause> parse_program(std::string_view text);

// A named clause list. Clause storage is copy-on-write: readers take a
// snapshot and never see later assert/retract (logical update view).
class LWProgram {
 public:
  using ClauseList = std::vector<Clause>;

  LWProgram(ProgramId id, ClauseList clauses);

  const ProgramId& id() const { return id_; }
  std::shared_ptr<const ClauseList> snapshot() const { return clauses_; }
  std::size_t size() const { return clauses_->size(); }

  // True if some clause head has this name and arity.
  bool defines(const std::string& name, std::size_t arity) const;

  void add_front(Clause c);
  void add_back(Clause c);
  // Removes the clause at the given position of the current list.
  void remove_at(std::size_t index);

 private:
  ProgramId id_;
  std::shared_ptr<const ClauseList> clauses_;
};

// The set S of created programs.
class ProgramStore {
 public:
  using Map = std::map<ProgramId, std::shared_ptr<LWProgram>>;

  bool contains(const ProgramId& id) const { return programs_.count(id) != 0; }
  std::shared_ptr<LWProgram> find(const ProgramId& id) const;
  // Installs or replaces the entry keyed by the program's id.
  void install(std::shared_ptr<LWProgram> program);
  bool erase(const ProgramId& id);
  void clear() { programs_.clear(); }

  std::size_t size() const { return programs_.size(); }
  std::vector<ProgramId> ids() const;
  Map::const_iterator begin() const { return programs_.begin(); }
  Map::const_iterator end() const { return programs_.end(); }

 private:
  Map programs_;
};

// ---------------------------------------------------------------- expressions

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { Id, Current, Union, Intersection, Restriction, Encapsulation, ReduceRestrict, ReduceOp, Empty };

  Kind kind;
  std::optional<ProgramId> id;  // Kind::Id
  // Union/Intersection: [E, F]; Restriction: [E, P]; Encapsulation: [E];
  // ReduceRestrict: [E, P1, ..., Pn]; ReduceOp: [E1, ..., En].
  std::vector<ExprPtr> children;
  char op = 0;  // ReduceOp: '+' or '*'

  static ExprPtr program(ProgramId id);
  static ExprPtr current();
  static ExprPtr empty();
  static ExprPtr unite(ExprPtr a, ExprPtr b);
  static ExprPtr intersect(ExprPtr a, ExprPtr b);
  static ExprPtr restrict(ExprPtr e, ExprPtr p);
  static ExprPtr encapsulate(ExprPtr e);
  static ExprPtr reduce_restrict(ExprPtr e, std::vector<ExprPtr> ps);
  static ExprPtr reduce(char op, std::vector<ExprPtr> es);
};

bool operator==(const Expr& a, const Expr& b);
inline bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }
bool same_expr(const ExprPtr& a, const ExprPtr& b);

Term expr_to_term(const Expr& e);
// Throws ExprError on terms outside the expression grammar.
ExprPtr expr_from_term(const Term& t);
std::string to_string(const Expr& e);

// Distinct program identifiers, in first-occurrence order.
std::vector<ProgramId> expids(const Expr& e);
bool contains_current(const Expr& e);
// Replaces every (#) by ctx. Throws ExprError when a restriction operand
// would stop being a program identifier.
ExprPtr insert_current_context(const ExprPtr& e, const ExprPtr& ctx);

// ---------------------------------------------------------------- disk cache

struct CachedProgram {
  std::shared_ptr<LWProgram> program;
  std::optional<ProgramId> policy;
};

// Line 1: the id term; line 2: `% policy <id>` (or `% policy none`); then clauses.
std::string serialize_program(const LWProgram& p, const std::optional<ProgramId>& policy);
CachedProgram deserialize_program(std::string_view text);

// One file per program under `dir`, named after a hash of the id.
std::filesystem::path cache_file_for(const std::filesystem::path& dir, const ProgramId& id);

}  // namespace logicweb
