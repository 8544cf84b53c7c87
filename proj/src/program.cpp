#include "logicweb/program.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

#include "logicweb/syntax.hpp"

namespace logicweb {

bool valid_url(std::string_view url) {
  auto colon = url.find(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 >= url.size()) return false;
  if (!std::isalpha(static_cast<unsigned char>(url[0]))) return false;
  for (std::size_t i = 1; i < colon; ++i) {
    char c = url[i];
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' && c != '.') return false;
  }
  for (char c : url) {
    if (std::isspace(static_cast<unsigned char>(c)) || std::iscntrl(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

// ------------------------------------------------------------------ ProgramId

ProgramId::ProgramId(Method m, std::vector<PostField> f, std::string url)
    : method_(m), fields_(std::move(f)), url_(std::move(url)) {
  if (!valid_url(url_)) throw ExprError("not a URL: " + url_);
  key_ = logicweb::to_string(to_term());
}

ProgramId ProgramId::head(std::string url) { return ProgramId(Method::Head, {}, std::move(url)); }
ProgramId ProgramId::get(std::string url) { return ProgramId(Method::Get, {}, std::move(url)); }
ProgramId ProgramId::post(std::vector<PostField> fields, std::string url) {
  return ProgramId(Method::Post, std::move(fields), std::move(url));
}

Term ProgramId::method_term() const {
  switch (method_) {
    case Method::Head:
      return Term::atom("head");
    case Method::Get:
      return Term::atom("get");
    case Method::Post: {
      std::vector<Term> items;
      for (const auto& f : fields_) {
        items.push_back(Term::compound("field", {Term::string(f.name), Term::string(f.value)}));
      }
      return Term::compound("post", {Term::list(items)});
    }
  }
  return Term::atom("get");
}

Term ProgramId::to_term() const { return Term::compound("lw", {method_term(), Term::string(url_)}); }

std::optional<ProgramId> ProgramId::from_term(const Term& t) {
  if (!t.is_functor("lw", 2)) return std::nullopt;
  const Term& m = t.arg(0);
  const Term& u = t.arg(1);
  if (!u.is_text() || !valid_url(u.text())) return std::nullopt;
  if (m.is_atom("get")) return get(u.text());
  if (m.is_atom("head")) return head(u.text());
  if (m.is_functor("post", 1)) {
    std::vector<PostField> fields;
    Term cur = m.arg(0);
    while (cur.is_functor(".", 2)) {
      const Term& f = cur.arg(0);
      if (!f.is_functor("field", 2) || !f.arg(0).is_text() || !f.arg(1).is_text()) return std::nullopt;
      fields.push_back({f.arg(0).text(), f.arg(1).text()});
      cur = cur.arg(1);
    }
    if (!cur.is_atom("[]")) return std::nullopt;
    return post(std::move(fields), u.text());
  }
  return std::nullopt;
}

// --------------------------------------------------------------------- Clause

Clause Clause::from_term(const Term& t) {
  Clause c;
  if (t.is_functor(":-", 2)) {
    c.head = t.arg(0);
    c.body = t.arg(1);
  } else {
    c.head = t;
    c.body = Term::atom("true");
  }
  if (!c.head.is_callable()) throw ExprError("clause head is not callable: " + to_string(c.head));
  return c;
}

Term Clause::to_term() const {
  if (body.is_atom("true")) return head;
  return Term::compound(":-", {head, body});
}

std::vector<Clause> parse_program(std::string_view text) {
  std::vector<Clause> out;
  for (const auto& rt : read_terms(text)) {
    if (rt.term.is_functor(":-", 1) || rt.term.is_functor("?-", 1)) {
      throw ParseError("directives are not allowed", rt.line, 1);
    }
    try {
      out.push_back(Clause::from_term(rt.term));
    } catch (const ExprError& e) {
      throw ParseError(e.what(), rt.line, 1);
    }
  }
  return out;
}

// ------------------------------------------------------------------ LWProgram

LWProgram::LWProgram(ProgramId id, ClauseList clauses)
    : id_(std::move(id)), clauses_(std::make_shared<const ClauseList>(std::move(clauses))) {}

bool LWProgram::defines(const std::string& name, std::size_t arity) const {
  return std::any_of(clauses_->begin(), clauses_->end(),
                     [&](const Clause& c) { return c.head.is_functor(name, arity); });
}

void LWProgram::add_front(Clause c) {
  auto next = std::make_shared<ClauseList>();
  next->reserve(clauses_->size() + 1);
  next->push_back(std::move(c));
  next->insert(next->end(), clauses_->begin(), clauses_->end());
  clauses_ = std::move(next);
}

void LWProgram::add_back(Clause c) {
  auto next = std::make_shared<ClauseList>(*clauses_);
  next->push_back(std::move(c));
  clauses_ = std::move(next);
}

void LWProgram::remove_at(std::size_t index) {
  if (index >= clauses_->size()) return;
  auto next = std::make_shared<ClauseList>(*clauses_);
  next->erase(next->begin() + static_cast<std::ptrdiff_t>(index));
  clauses_ = std::move(next);
}

// --------------------------------------------------------------- ProgramStore

std::shared_ptr<LWProgram> ProgramStore::find(const ProgramId& id) const {
  auto it = programs_.find(id);
  return it == programs_.end() ? nullptr : it->second;
}

void ProgramStore::install(std::shared_ptr<LWProgram> program) {
  ProgramId id = program->id();
  programs_.insert_or_assign(std::move(id), std::move(program));
}

bool ProgramStore::erase(const ProgramId& id) { return programs_.erase(id) != 0; }

std::vector<ProgramId> ProgramStore::ids() const {
  std::vector<ProgramId> out;
  out.reserve(programs_.size());
  for (const auto& [id, p] : programs_) out.push_back(id);
  return out;
}

// ---------------------------------------------------------------- expressions

namespace {

ExprPtr make(Expr::Kind k, std::vector<ExprPtr> children = {}, char op = 0) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->children = std::move(children);
  e->op = op;
  return e;
}

bool is_id_operand(const ExprPtr& e) { return e->kind == Expr::Kind::Id || e->kind == Expr::Kind::Current; }

ExprPtr operand_from_term(const Term& t) {
  ExprPtr p = expr_from_term(t);
  if (!is_id_operand(p)) throw ExprError("restriction operand must be a program identifier: " + to_string(t));
  return p;
}

std::vector<Term> list_items(const Term& t) {
  std::vector<Term> items;
  Term cur = t;
  while (cur.is_functor(".", 2)) {
    items.push_back(cur.arg(0));
    cur = cur.arg(1);
  }
  if (!cur.is_atom("[]")) throw ExprError("expected a proper list: " + to_string(t));
  return items;
}

}  // namespace

ExprPtr Expr::program(ProgramId id) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Id;
  e->id = std::move(id);
  return e;
}
ExprPtr Expr::current() {
  static const ExprPtr c = make(Kind::Current);
  return c;
}
ExprPtr Expr::empty() {
  static const ExprPtr c = make(Kind::Empty);
  return c;
}
ExprPtr Expr::unite(ExprPtr a, ExprPtr b) { return make(Kind::Union, {std::move(a), std::move(b)}); }
ExprPtr Expr::intersect(ExprPtr a, ExprPtr b) { return make(Kind::Intersection, {std::move(a), std::move(b)}); }
ExprPtr Expr::restrict(ExprPtr e, ExprPtr p) {
  if (!is_id_operand(p)) throw ExprError("restriction operand must be a program identifier");
  return make(Kind::Restriction, {std::move(e), std::move(p)});
}
ExprPtr Expr::encapsulate(ExprPtr e) { return make(Kind::Encapsulation, {std::move(e)}); }
ExprPtr Expr::reduce_restrict(ExprPtr e, std::vector<ExprPtr> ps) {
  for (const auto& p : ps) {
    if (!is_id_operand(p)) throw ExprError("restriction operand must be a program identifier");
  }
  ps.insert(ps.begin(), std::move(e));
  return make(Kind::ReduceRestrict, std::move(ps));
}
ExprPtr Expr::reduce(char op, std::vector<ExprPtr> es) {
  if (op != '+' && op != '*') throw ExprError("reduce operator must be + or *");
  if (es.empty()) throw ExprError("reduce needs a non-empty list");
  return make(Kind::ReduceOp, std::move(es), op);
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.op != b.op || a.id != b.id || a.children.size() != b.children.size()) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!same_expr(a.children[i], b.children[i])) return false;
  }
  return true;
}

bool same_expr(const ExprPtr& a, const ExprPtr& b) { return a == b || (a && b && *a == *b); }

Term expr_to_term(const Expr& e) {
  auto sub = [](const ExprPtr& c) { return expr_to_term(*c); };
  switch (e.kind) {
    case Expr::Kind::Id:
      return e.id->to_term();
    case Expr::Kind::Current:
      return Term::atom("#");
    case Expr::Kind::Empty:
      return Term::atom("empty");
    case Expr::Kind::Union:
      return Term::compound("+", {sub(e.children[0]), sub(e.children[1])});
    case Expr::Kind::Intersection:
      return Term::compound("*", {sub(e.children[0]), sub(e.children[1])});
    case Expr::Kind::Restriction:
      return Term::compound("/", {sub(e.children[0]), sub(e.children[1])});
    case Expr::Kind::Encapsulation:
      return Term::compound("@", {sub(e.children[0])});
    case Expr::Kind::ReduceRestrict: {
      std::vector<Term> ps;
      for (std::size_t i = 1; i < e.children.size(); ++i) ps.push_back(sub(e.children[i]));
      return Term::compound("<>", {Term::atom("/"), Term::compound(",", {sub(e.children[0]), Term::list(ps)})});
    }
    case Expr::Kind::ReduceOp: {
      std::vector<Term> es;
      for (const auto& c : e.children) es.push_back(sub(c));
      return Term::compound("<>", {Term::atom(std::string(1, e.op)), Term::list(es)});
    }
  }
  return Term::atom("empty");
}

ExprPtr expr_from_term(const Term& t) {
  if (t.is_atom("#")) return Expr::current();
  if (t.is_atom("empty")) return Expr::empty();
  if (t.is_functor("lw", 2)) {
    auto id = ProgramId::from_term(t);
    if (!id) throw ExprError("malformed program identifier: " + to_string(t));
    return Expr::program(*id);
  }
  if (t.is_functor("+", 2)) return Expr::unite(expr_from_term(t.arg(0)), expr_from_term(t.arg(1)));
  if (t.is_functor("*", 2)) return Expr::intersect(expr_from_term(t.arg(0)), expr_from_term(t.arg(1)));
  if (t.is_functor("/", 2)) return Expr::restrict(expr_from_term(t.arg(0)), operand_from_term(t.arg(1)));
  if (t.is_functor("@", 1)) return Expr::encapsulate(expr_from_term(t.arg(0)));
  if (t.is_functor("<>", 2)) {
    const Term& op = t.arg(0);
    const Term& rhs = t.arg(1);
    if (op.is_atom("/")) {
      if (!rhs.is_functor(",", 2)) throw ExprError("expected (/)<>(E, List): " + to_string(t));
      std::vector<ExprPtr> ps;
      for (const auto& item : list_items(rhs.arg(1))) ps.push_back(operand_from_term(item));
      return Expr::reduce_restrict(expr_from_term(rhs.arg(0)), std::move(ps));
    }
    if (op.is_atom("+") || op.is_atom("*")) {
      std::vector<ExprPtr> es;
      for (const auto& item : list_items(rhs)) es.push_back(expr_from_term(item));
      return Expr::reduce(op.name()[0], std::move(es));
    }
  }
  throw ExprError("not a program expression: " + to_string(t));
}

std::string to_string(const Expr& e) { return to_string(expr_to_term(e)); }

namespace {

void collect_ids(const Expr& e, std::vector<ProgramId>& out) {
  if (e.kind == Expr::Kind::Id) {
    if (std::find(out.begin(), out.end(), *e.id) == out.end()) out.push_back(*e.id);
    return;
  }
  for (const auto& c : e.children) collect_ids(*c, out);
}

}  // namespace

std::vector<ProgramId> expids(const Expr& e) {
  std::vector<ProgramId> out;
  collect_ids(e, out);
  return out;
}

bool contains_current(const Expr& e) {
  if (e.kind == Expr::Kind::Current) return true;
  return std::any_of(e.children.begin(), e.children.end(), [](const ExprPtr& c) { return contains_current(*c); });
}

ExprPtr insert_current_context(const ExprPtr& e, const ExprPtr& ctx) {
  if (e->kind == Expr::Kind::Current) return ctx;
  if (e->children.empty() || !contains_current(*e)) return e;
  std::vector<ExprPtr> children;
  children.reserve(e->children.size());
  for (const auto& c : e->children) children.push_back(insert_current_context(c, ctx));
  switch (e->kind) {
    case Expr::Kind::Union:
      return Expr::unite(children[0], children[1]);
    case Expr::Kind::Intersection:
      return Expr::intersect(children[0], children[1]);
    case Expr::Kind::Restriction:
      return Expr::restrict(children[0], children[1]);
    case Expr::Kind::Encapsulation:
      return Expr::encapsulate(children[0]);
    case Expr::Kind::ReduceRestrict: {
      ExprPtr head = children.front();
      children.erase(children.begin());
      return Expr::reduce_restrict(head, std::move(children));
    }
    case Expr::Kind::ReduceOp:
      return Expr::reduce(e->op, std::move(children));
    default:
      return e;
  }
}

// ----------------------------------------------------------------- disk cache

std::string serialize_program(const LWProgram& p, const std::optional<ProgramId>& policy) {
  std::string out = p.id().to_string() + ".\n";
  out += "% policy " + (policy ? policy->to_string() : std::string("none")) + "\n";
  for (const auto& c : *p.snapshot()) out += to_string(c.to_term()) + ".\n";
  return out;
}

CachedProgram deserialize_program(std::string_view text) {
  auto nl1 = text.find('\n');
  if (nl1 == std::string_view::npos) throw ExprError("cache file: missing id line");
  auto nl2 = text.find('\n', nl1 + 1);
  if (nl2 == std::string_view::npos) nl2 = text.size();
  auto id = ProgramId::from_term(read_term(text.substr(0, nl1)).term);
  if (!id) throw ExprError("cache file: malformed id line");
  std::string_view policy_line = text.substr(nl1 + 1, nl2 - nl1 - 1);
  constexpr std::string_view prefix = "% policy ";
  if (policy_line.substr(0, prefix.size()) != prefix) throw ExprError("cache file: missing policy line");
  policy_line.remove_prefix(prefix.size());
  CachedProgram out;
  if (policy_line != "none") {
    out.policy = ProgramId::from_term(read_term(policy_line).term);
    if (!out.policy) throw ExprError("cache file: malformed policy id");
  }
  std::string_view rest = nl2 < text.size() ? text.substr(nl2 + 1) : std::string_view{};
  out.program = std::make_shared<LWProgram>(*id, parse_program(rest));
  return out;
}

std::filesystem::path cache_file_for(const std::filesystem::path& dir, const ProgramId& id) {
  // FNV-1a; stable across runs and platforms.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : id.to_string()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char name[32];
  std::snprintf(name, sizeof(name), "%016llx.lw", static_cast<unsigned long long>(h));
  return dir / name;
}

}  // namespace logicweb
