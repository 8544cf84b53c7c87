#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "logicweb/syntax.hpp"
#include "support.hpp"

using namespace logicweb;
using lwtest::term;

TEST(Reader, Atoms) {
  EXPECT_EQ(term("a"), Term::atom("a"));
  EXPECT_EQ(term("'hello world'"), Term::atom("hello world"));
  EXPECT_EQ(term("[]"), Term::nil());
  EXPECT_EQ(term("\"Melb. U\""), Term::string("Melb. U"));
  EXPECT_EQ(term("42"), Term::integer(42));
  EXPECT_EQ(term("-3"), Term::integer(-3));
  EXPECT_EQ(term("2.5"), Term::decimal(2.5));
}

TEST(Reader, NamedVariablesShareIdentity) {
  ReadTerm rt = read_term("p(X, Y, X, _)");
  ASSERT_EQ(rt.variables.size(), 2u);
  EXPECT_EQ(rt.variables[0].first, "X");
  EXPECT_EQ(rt.term.arg(0), rt.term.arg(2));
  EXPECT_NE(rt.term.arg(0), rt.term.arg(1));
  EXPECT_NE(rt.term.arg(3), rt.term.arg(1));
}

TEST(Reader, Lists) {
  Term t = term("[a, b | T]");
  ASSERT_TRUE(t.is_functor(".", 2));
  EXPECT_EQ(t.arg(0), Term::atom("a"));
  EXPECT_TRUE(t.arg(1).arg(1).is_var());
  Term items[] = {Term::integer(1), Term::integer(2)};
  EXPECT_EQ(term("[1, 2]"), Term::list(items));
}

TEST(Reader, OperatorPrecedence) {
  Term t = term("a :- b, c ; d");
  ASSERT_TRUE(t.is_functor(":-", 2));
  EXPECT_TRUE(t.arg(1).is_functor(";", 2));
  EXPECT_TRUE(t.arg(1).arg(0).is_functor(",", 2));
  Term arith = term("X is 1 + 2 * 3 - 4");
  EXPECT_TRUE(arith.arg(1).is_functor("-", 2));
  EXPECT_TRUE(arith.arg(1).arg(0).arg(1).is_functor("*", 2));
}

TEST(Reader, ContextSwitchOperators) {
  Term t = term("p :- lw(get, \"u\") #> q");
  EXPECT_TRUE(t.arg(1).is_functor("#>", 2));
  Term e = term("(@(a) + b) #> g");
  EXPECT_TRUE(e.arg(0).is_functor("+", 2));
  EXPECT_TRUE(e.arg(0).arg(0).is_functor("@", 1));
  Term r = term("a <> [b, c] #> g");
  EXPECT_TRUE(r.arg(0).is_functor("<>", 2));
  Term m = term("built_ins:open(F, write, S)");
  EXPECT_TRUE(m.is_functor(":", 2));
}

TEST(Reader, Comments) {
  auto ts = read_terms("% line comment\na. /* block\ncomment */ b.\n");
  ASSERT_EQ(ts.size(), 2u);
  EXPECT_EQ(ts[1].term, Term::atom("b"));
  EXPECT_EQ(ts[1].line, 3);
}

TEST(Reader, ErrorsCarryLocation) {
  try {
    read_terms("a.\nb(.\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_GE(e.column(), 1);
  }
  EXPECT_THROW(read_term("f(a"), ParseError);
  EXPECT_THROW(read_term("\"unterminated"), ParseError);
  EXPECT_THROW(read_terms("a"), ParseError);
}

TEST(Reader, StringEscapes) {
  EXPECT_EQ(term("\"a\\\"b\\n\""), Term::string("a\"b\n"));
  EXPECT_EQ(quote_string("a\"b"), "\"a\\\"b\"");
}

TEST(Writer, Canonical) {
  EXPECT_EQ(to_string(term("f(a, \"b\", 'C d', [1, 2])")), "f(a, \"b\", 'C d', [1, 2])");
  EXPECT_EQ(to_string(term("a :- b, c")), "a :- b, c");
  EXPECT_EQ(to_string(term("(a, b) ; c")), "a, b ; c");
  EXPECT_EQ(to_string(term("(a ; b), c")), "(a ; b), c");
  EXPECT_EQ(to_string(term("1 - (2 - 3)")), "1 - (2 - 3)");
  EXPECT_EQ(to_string(term("- 1")), "-(1)");
  EXPECT_EQ(term("-1"), Term::integer(-1));
  EXPECT_EQ(to_string(term("-(a <> b)")), "-a <> b");
  EXPECT_EQ(to_string(term("@((a : b) : c)")), "@ (a : b) : c");
  EXPECT_EQ(to_string(term("[a | b]")), "[a|b]");
}

TEST(SyntaxProperties, WriteReadRoundTrip) {
  std::mt19937 rng(21);
  const char* ops[] = {",", ";", "->", "#>", "=", "+", "-", "*", "<>", ":"};
  std::function<Term(int)> gen = [&](int depth) -> Term {
    unsigned r = rng() % (depth > 0 ? 9 : 5);
    switch (r) {
      case 0:
        return Term::atom(rng() % 2 ? "a" : "Quoted atom");
      case 1:
        return Term::integer(static_cast<std::int64_t>(rng() % 7) - 3);
      case 2:
        return Term::string("s\"" + std::to_string(rng() % 9));
      case 3:
        return Term::decimal(0.5 * (rng() % 5));
      case 4:
        return Term::atom("[]");
      case 5:
      case 6:
        return Term::compound(ops[rng() % 10], {gen(depth - 1), gen(depth - 1)});
      case 7:
        return Term::compound(rng() % 2 ? "@" : "-", {gen(depth - 1)});
      default: {
        std::vector<Term> items = {gen(depth - 1), gen(depth - 1)};
        return Term::list(items);
      }
    }
  };
  for (int i = 0; i < 2000; ++i) {
    Term t = gen(4);
    std::string text = to_string(t);
    Term back;
    ASSERT_NO_THROW(back = read_term(text).term) << text;
    EXPECT_EQ(back, t) << text << " -> " << to_string(back);
  }
}
