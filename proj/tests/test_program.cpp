#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <random>
#include <set>

#include "logicweb/program.hpp"
#include "logicweb/syntax.hpp"
#include "support.hpp"

using namespace logicweb;
using lwtest::get;
using lwtest::term;

namespace {

std::set<ProgramId> as_set(const std::vector<ProgramId>& v) { return {v.begin(), v.end()}; }

ExprPtr random_expr(std::mt19937& rng, int depth, bool allow_current) {
  static const char* urls[] = {"http://a.example/", "http://b.example/", "http://c.example/", "http://d.example/"};
  auto leaf = [&]() -> ExprPtr {
    if (allow_current && rng() % 4 == 0) return Expr::current();
    return Expr::program(get(urls[rng() % 4]));
  };
  if (depth == 0) return leaf();
  switch (rng() % 7) {
    case 0:
      return Expr::unite(random_expr(rng, depth - 1, allow_current), random_expr(rng, depth - 1, allow_current));
    case 1:
      return Expr::intersect(random_expr(rng, depth - 1, allow_current), random_expr(rng, depth - 1, allow_current));
    case 2:
      return Expr::encapsulate(random_expr(rng, depth - 1, allow_current));
    case 3:
      return Expr::restrict(random_expr(rng, depth - 1, allow_current), Expr::program(get(urls[rng() % 4])));
    case 4:
      return Expr::reduce(rng() % 2 ? '+' : '*',
                          {random_expr(rng, depth - 1, allow_current), random_expr(rng, depth - 1, allow_current)});
    case 5:
      return Expr::reduce_restrict(random_expr(rng, depth - 1, allow_current), {Expr::program(get(urls[rng() % 4]))});
    default:
      return leaf();
  }
}

bool has_current(const Expr& e) {
  if (e.kind == Expr::Kind::Current) return true;
  return std::any_of(e.children.begin(), e.children.end(), [](const ExprPtr& c) { return has_current(*c); });
}

}  // namespace

TEST(ProgramId, Identity) {
  EXPECT_EQ(ProgramId::get("http://x/"), ProgramId::get("http://x/"));
  EXPECT_NE(ProgramId::get("http://x/"), ProgramId::head("http://x/"));
  auto p1 = ProgramId::post({{"a", "1"}, {"b", "2"}}, "http://x/");
  auto p2 = ProgramId::post({{"b", "2"}, {"a", "1"}}, "http://x/");
  EXPECT_NE(p1, p2);
  EXPECT_EQ(ProgramId::from_term(p1.to_term()), p1);
  EXPECT_EQ(ProgramId::from_term(term("lw(get, \"http://x/\")")), ProgramId::get("http://x/"));
  EXPECT_FALSE(ProgramId::from_term(term("lw(put, \"http://x/\")")));
  EXPECT_FALSE(ProgramId::from_term(term("lw(get, x)")));
  EXPECT_THROW(ProgramId::get("no scheme"), ExprError);
}

TEST(Expids, Examples) {
  auto a = Expr::program(get("http://a.example/"));
  auto b = Expr::program(get("http://b.example/"));
  EXPECT_EQ(as_set(expids(*Expr::unite(a, Expr::encapsulate(b)))), as_set({*a->id, *b->id}));
  EXPECT_EQ(expids(*a), std::vector<ProgramId>{*a->id});
  auto r = expids(*Expr::reduce('+', {a, b, a}));
  EXPECT_EQ(r.size(), 2u);
  EXPECT_EQ(as_set(r), as_set({*a->id, *b->id}));
  EXPECT_TRUE(expids(*Expr::current()).empty());
}

TEST(InsertCurrentContext, Examples) {
  auto a = Expr::program(get("http://a.example/"));
  auto b = Expr::program(get("http://b.example/"));
  auto c = Expr::program(get("http://c.example/"));
  EXPECT_EQ(*insert_current_context(Expr::unite(Expr::current(), b), a), *Expr::unite(a, b));
  EXPECT_EQ(*insert_current_context(b, a), *b);
  auto ac = Expr::intersect(a, c);
  EXPECT_EQ(*insert_current_context(Expr::encapsulate(Expr::current()), ac), *Expr::encapsulate(ac));
}

TEST(InsertCurrentContext, RestrictionOperandMustStayAnId) {
  auto a = Expr::program(get("http://a.example/"));
  auto b = Expr::program(get("http://b.example/"));
  auto restricted = Expr::restrict(a, Expr::current());
  EXPECT_EQ(*insert_current_context(restricted, b), *Expr::restrict(a, b));
  EXPECT_THROW(insert_current_context(restricted, Expr::unite(a, b)), ExprError);
  EXPECT_THROW(Expr::restrict(a, Expr::unite(a, b)), ExprError);
}

TEST(ExprTerms, RoundTrip) {
  Term t = term("(lw(get, \"http://a/\") + @lw(get, \"http://b/\")) * (#)");
  ExprPtr e = expr_from_term(t);
  EXPECT_EQ(e->kind, Expr::Kind::Intersection);
  EXPECT_EQ(*expr_from_term(expr_to_term(*e)), *e);
  EXPECT_THROW(expr_from_term(term("foo")), ExprError);
  ExprPtr reduced = Expr::reduce('+', {Expr::program(lwtest::get("http://a/")), Expr::program(lwtest::get("http://b/"))});
  EXPECT_EQ(*expr_from_term(term(to_string(*reduced))), *reduced);
}

TEST(ParseProgram, Examples) {
  auto cs = parse_program("interested_in(X) :- interests(Is), member(X, Is).");
  ASSERT_EQ(cs.size(), 1u);
  EXPECT_TRUE(cs[0].body.is_functor(",", 2));
  auto fact = parse_program("a.");
  ASSERT_EQ(fact.size(), 1u);
  EXPECT_EQ(fact[0].head, Term::atom("a"));
  EXPECT_EQ(fact[0].body, Term::atom("true"));
  auto sw = parse_program("p :- lw(get, \"u\")#>q.");
  EXPECT_TRUE(sw[0].body.is_functor("#>", 2));
}

TEST(ParseProgram, Rejects) {
  EXPECT_THROW(parse_program("X :- a."), ParseError);
  EXPECT_THROW(parse_program("3."), ParseError);
  EXPECT_THROW(parse_program("p :- ."), ParseError);
  EXPECT_ANY_THROW(parse_program(":- initialization(main)."));
}

TEST(LWProgram, SnapshotsAreStable) {
  LWProgram p(get("http://a.example/"), parse_program("f(1). f(2)."));
  auto snap = p.snapshot();
  p.add_back(Clause::from_term(term("f(3)")));
  p.add_front(Clause::from_term(term("f(0)")));
  p.remove_at(1);
  EXPECT_EQ(snap->size(), 2u);
  ASSERT_EQ(p.size(), 3u);
  EXPECT_EQ((*p.snapshot())[0].head, term("f(0)"));
  EXPECT_EQ((*p.snapshot())[1].head, term("f(2)"));
  EXPECT_TRUE(p.defines("f", 1));
  EXPECT_FALSE(p.defines("f", 2));
}

TEST(ProgramStore, KeyedById) {
  ProgramStore s;
  auto id = get("http://a.example/");
  s.install(std::make_shared<LWProgram>(id, parse_program("a.")));
  EXPECT_TRUE(s.contains(id));
  EXPECT_EQ(s.find(id)->id(), id);
  for (const auto& [key, prog] : s) EXPECT_EQ(key, prog->id());
  EXPECT_TRUE(s.erase(id));
  EXPECT_FALSE(s.contains(id));
}

TEST(Cache, SerializeRoundTrip) {
  LWProgram p(get("http://a.example/x"), parse_program("h_text(\"a\\nb\"). p(X) :- q(X), lw(get, \"u:v\") #> r."));
  auto pol = get("file:///policies/allow.html");
  CachedProgram back = deserialize_program(serialize_program(p, pol));
  EXPECT_EQ(back.program->id(), p.id());
  EXPECT_EQ(back.policy, pol);
  ASSERT_EQ(back.program->size(), p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    EXPECT_TRUE(variant((*back.program->snapshot())[i].to_term(), (*p.snapshot())[i].to_term()));
  }
  EXPECT_FALSE(deserialize_program(serialize_program(p, std::nullopt)).policy);
  lwtest::ScratchDir dir;
  EXPECT_EQ(cache_file_for(dir.path(), p.id()), cache_file_for(dir.path(), p.id()));
  EXPECT_NE(cache_file_for(dir.path(), p.id()), cache_file_for(dir.path(), get("http://a.example/y")));
}

// ---------------------------------------------------------------- properties

TEST(ProgramProperties, ExpidsAfterInsert) {
  std::mt19937 rng(31);
  for (int i = 0; i < 1000; ++i) {
    ExprPtr e = random_expr(rng, 3, true);
    ExprPtr c = random_expr(rng, 2, false);
    ExprPtr inserted;
    try {
      inserted = insert_current_context(e, c);
    } catch (const ExprError&) {
      continue;  // a non-id context landed in a restriction operand
    }
    std::set<ProgramId> expected = as_set(expids(*e));
    if (has_current(*e)) {
      for (const auto& id : expids(*c)) expected.insert(id);
    }
    EXPECT_EQ(as_set(expids(*inserted)), expected) << to_string(*e);
    EXPECT_FALSE(has_current(*inserted));
    EXPECT_EQ(*insert_current_context(inserted, c), *inserted);
  }
}

TEST(ProgramProperties, ClauseTextRoundTrip) {
  std::mt19937 rng(32);
  for (int i = 0; i < 300; ++i) {
    auto prog = lwtest::random_stratified_program(rng);
    auto first = parse_program(prog.text);
    std::string printed;
    for (const auto& c : first) printed += to_string(c.to_term()) + ".\n";
    auto second = parse_program(printed);
    ASSERT_EQ(first.size(), second.size());
    for (std::size_t k = 0; k < first.size(); ++k) {
      EXPECT_TRUE(variant(first[k].to_term(), second[k].to_term())) << printed;
    }
  }
}
